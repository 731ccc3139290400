import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parallaxfx.errors import ContractError, EmptyInputError, GeometryError, ParameterError
from parallaxfx.layering import (
    Instance,
    InstanceSet,
    PipelineConfig,
    RankedInstance,
    assign_layers,
    filter_small,
    instances_from_depth,
    join_near,
    make_instance,
    mean_depth_at,
    rank_instances,
    two_layer_split,
)

from oracles import flood_fill_components


def square_instance(id, shape, top, left, size):
    m = np.zeros(shape, bool)
    m[top : top + size, left : left + size] = True
    return make_instance(id, m)


def area_instance(id, area, shape=(100, 100)):
    m = np.zeros(shape, bool).ravel()
    m[:area] = True
    return make_instance(id, m.reshape(shape))


def ranked(id, d, area=10):
    m = np.zeros((10, 10), bool).ravel()
    m[:area] = True
    return RankedInstance(make_instance(id, m.reshape(10, 10)), (0.0, 0.0), d)


def two_object_scene(d_a, d_b, background=0.1):
    depth = np.full((40, 40), background)
    a = square_instance(1, depth.shape, 5, 5, 10)
    b = square_instance(2, depth.shape, 25, 25, 10)
    depth[a.mask] = d_a
    depth[b.mask] = d_b
    return InstanceSet([a, b]), depth


class TestTypes:
    def test_instance_area_checked(self):
        with pytest.raises(ParameterError):
            Instance(0, np.ones((2, 2), bool), 3)

    def test_instance_nonempty(self):
        with pytest.raises(EmptyInputError):
            make_instance(0, np.zeros((2, 2), bool))

    def test_unique_ids(self):
        a = area_instance(1, 5)
        with pytest.raises(ParameterError):
            InstanceSet([a, a])

    @pytest.mark.parametrize("kw", [{"blur_kernel": 6}, {"join_tolerance": 1.5}, {"inpaint_radius": 0.5}])
    def test_config_validation(self, kw):
        with pytest.raises(ParameterError):
            PipelineConfig(**kw)

    def test_config_defaults(self):
        c = PipelineConfig()
        assert (c.depth_kernel, c.blur_kernel, c.dilate_kernel) == (5, 7, 11)
        assert (c.min_relative_area, c.join_tolerance) == (0.05, 0.20)


class TestMeanDepth:
    def test_constant(self):
        assert mean_depth_at(np.full((10, 10), 0.7), (4.2, 6.8), 5) == pytest.approx(0.7)

    def test_corner_window(self, rng):
        d = rng.random((10, 10))
        expected = np.mean([d[r, c] for r in range(3) for c in range(3)])
        assert mean_depth_at(d, (0.0, 0.0), 5) == pytest.approx(expected)

    def test_ramp(self):
        d = np.tile(np.arange(10) / 9, (10, 1))
        cells = [d[r, c] for r in range(3, 8) for c in range(3, 8)]
        assert mean_depth_at(d, (5.0, 5.0), 5) == pytest.approx(sum(cells) / len(cells))
        assert mean_depth_at(d, (5.0, 5.0), 5) == pytest.approx(5 / 9)

    def test_rounds_center(self):
        d = np.zeros((5, 5))
        d[2, 3] = 1.0
        # (1.5, 2.5) rounds half up to (2, 3)
        assert mean_depth_at(d, (1.5, 2.5), 1) == 1.0

    def test_out_of_bounds(self):
        with pytest.raises(GeometryError):
            mean_depth_at(np.zeros((4, 4)), (4.6, 0), 5)


class TestRank:
    def test_fig2_values(self):
        insts, depth = two_object_scene(0.27138, 0.63459)
        r = rank_instances(insts, depth, PipelineConfig())
        assert [x.id for x in r] == [2, 1]
        assert r[0].mean_depth == pytest.approx(0.63459)

    def test_single(self):
        insts, depth = two_object_scene(0.5, 0.5)
        r = rank_instances(InstanceSet([insts[0]]), depth)
        assert [x.id for x in r] == [1]

    def test_tie_break_area_then_id(self):
        depth = np.full((30, 30), 0.5)
        small = square_instance(0, depth.shape, 0, 0, 2)
        big = square_instance(7, depth.shape, 10, 10, 10)
        same = square_instance(3, depth.shape, 25, 25, 2)
        assert [x.id for x in rank_instances(InstanceSet([small, same, big]), depth)] == [7, 0, 3]

    def test_dimension_mismatch(self):
        insts, _ = two_object_scene(0.5, 0.4)
        with pytest.raises(GeometryError):
            rank_instances(insts, np.zeros((20, 20)))

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(1, 100).map(lambda v: v / 100), min_size=1, max_size=6), st.floats(0.05, 1.0))
    def test_permutation_order_and_scale_invariance(self, depths, lam):
        depth = np.zeros((12, 12 * len(depths)))
        insts = []
        for i, d in enumerate(depths):
            inst = square_instance(i, depth.shape, 2, 12 * i + 2, 8)
            depth[inst.mask] = d
            insts.append(inst)
        insts = InstanceSet(insts)
        r = rank_instances(insts, depth)
        assert sorted(x.id for x in r) == list(range(len(depths)))
        assert all(a.mean_depth >= b.mean_depth for a, b in zip(r, r[1:]))
        r2 = rank_instances(insts, depth * lam)
        assert [x.id for x in r2] == [x.id for x in r]
        groups = [[x.id for x in g] for g in join_near(r)]
        groups2 = [[x.id for x in g] for g in join_near(r2)]
        # the relative gap is scale invariant up to rounding exactly at the tolerance
        if groups != groups2:
            gaps = [(a.mean_depth - b.mean_depth) / a.mean_depth for a, b in zip(r, r[1:])]
            assert any(abs(g - 0.2) < 1e-9 for g in gaps)


class TestFilterSmall:
    def test_demote(self):
        kept, demoted = filter_small(InstanceSet([area_instance(0, 1000), area_instance(1, 40)]))
        assert [i.id for i in kept] == [0] and [i.id for i in demoted] == [1]

    def test_boundary_kept(self):
        kept, demoted = filter_small(InstanceSet([area_instance(0, 1000), area_instance(1, 50)]))
        assert len(kept) == 2 and len(demoted) == 0

    def test_single(self):
        kept, demoted = filter_small(InstanceSet([area_instance(0, 3)]))
        assert len(kept) == 1 and len(demoted) == 0

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            filter_small(InstanceSet())

    @given(st.lists(st.integers(1, 2000), min_size=1, max_size=8))
    def test_partition_keeps_largest(self, areas):
        insts = InstanceSet(area_instance(i, a, (50, 50)) for i, a in enumerate(areas))
        kept, demoted = filter_small(insts)
        ids = {i.id for i in kept} | {i.id for i in demoted}
        assert ids == set(range(len(areas))) and not ({i.id for i in kept} & {i.id for i in demoted})
        assert max(areas) in [i.area for i in kept]


class TestJoinNear:
    def test_join(self):
        assert len(join_near([ranked(0, 0.80), ranked(1, 0.70)])) == 1

    def test_fig2_separate(self):
        g = join_near([ranked(0, 0.63459), ranked(1, 0.27138)])
        assert len(g) == 2
        assert (0.63459 - 0.27138) / 0.63459 == pytest.approx(0.572, abs=1e-3)

    def test_single(self):
        assert [[x.id for x in g] for g in join_near([ranked(4, 0.3)])] == [[4]]

    def test_transitive_chain(self):
        g = join_near([ranked(0, 1.0), ranked(1, 0.85), ranked(2, 0.72), ranked(3, 0.3)])
        assert [[x.id for x in grp] for grp in g] == [[0, 1, 2], [3]]

    def test_zero_depths(self):
        assert len(join_near([ranked(0, 0.0), ranked(1, 0.0)])) == 1

    def test_unsorted(self):
        with pytest.raises(ContractError):
            join_near([ranked(0, 0.2), ranked(1, 0.5)])

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=10), st.floats(0, 1))
    def test_contiguous_runs(self, depths, tol):
        rs = [ranked(i, d) for i, d in enumerate(sorted(depths, reverse=True))]
        groups = join_near(rs, PipelineConfig(join_tolerance=tol))
        assert [x for g in groups for x in g] == rs
        assert all(groups)


class TestTwoLayer:
    def test_below_median_is_background(self):
        depth = np.full((10, 10), 0.5)
        a = square_instance(0, depth.shape, 0, 0, 3)
        b = square_instance(1, depth.shape, 5, 5, 3)
        depth[a.mask] = 0.3
        depth[b.mask] = 0.9
        insts = InstanceSet([a, b])
        out = two_layer_split(insts, rank_instances(insts, depth), depth)
        assert out.foreground_ids == {1} and out.background_ids == {0}

    def test_all_above_median(self):
        depth = np.full((20, 20), 0.1)
        insts = InstanceSet([square_instance(i, depth.shape, 5 * i, 0, 3) for i in range(3)])
        for inst in insts:
            depth[inst.mask] = 0.8
        out = two_layer_split(insts, rank_instances(insts, depth), depth)
        assert out.foreground_ids == {0, 1, 2}

    def test_exact_median_even_count(self):
        depth = (np.arange(16, dtype=float) / 15).reshape(4, 4)
        values = sorted(depth.ravel())
        median = (values[7] + values[8]) / 2
        assert median == pytest.approx(7.5 / 15)
        inst = square_instance(0, depth.shape, 0, 0, 1)
        r = [RankedInstance(inst, (0.0, 0.0), 0.5)]
        assert two_layer_split(InstanceSet([inst]), r, depth).foreground_ids == {0}
        r = [RankedInstance(inst, (0.0, 0.0), 0.49)]
        # empty foreground -> nearest promoted
        assert two_layer_split(InstanceSet([inst]), r, depth).foreground_ids == {0}

    def test_constant_map_all_foreground(self):
        depth = np.full((12, 12), 0.4)
        insts = InstanceSet([square_instance(i, depth.shape, 4 * i, 0, 3) for i in range(3)])
        out = two_layer_split(insts, rank_instances(insts, depth), depth)
        assert out.foreground_ids == {0, 1, 2} and not out.background_ids


class TestAssign:
    def test_tiny_object_excluded(self):
        depth = np.full((60, 60), 0.1)
        big = square_instance(0, depth.shape, 0, 0, 30)
        tiny = square_instance(1, depth.shape, 50, 50, 4)  # 16/900 < 5%
        depth[big.mask] = 0.6
        depth[tiny.mask] = 0.95
        out = assign_layers(InstanceSet([big, tiny]), depth)
        assert out.foreground_ids == {0} and out.background_ids == {1}
        assert np.array_equal(out.foreground_mask, big.mask)
        assert [r.id for r in out.ranking] == [1, 0]

    def test_fig2_squirrel_only(self):
        insts, depth = two_object_scene(0.63459, 0.27138)
        out = assign_layers(insts, depth)
        assert out.foreground_ids == {1}

    def test_joined_pair(self):
        insts, depth = two_object_scene(0.80, 0.70)
        out = assign_layers(insts, depth)
        assert out.foreground_ids == {1, 2}
        assert np.array_equal(out.foreground_mask, insts[0].mask | insts[1].mask)

    def test_two_layer_mode(self):
        insts, depth = two_object_scene(0.63459, 0.27138, background=0.05)
        out = assign_layers(insts, depth, PipelineConfig(two_layer_mode=True))
        assert out.foreground_ids == {1, 2}

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            assign_layers(InstanceSet(), np.zeros((3, 3)))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.tuples(st.integers(1, 8), st.floats(0, 1)), min_size=1, max_size=5), st.booleans())
    def test_foreground_nonempty_and_partition(self, specs, two_layer):
        depth = np.full((10, 10 * len(specs)), 0.2)
        insts = []
        for i, (size, d) in enumerate(specs):
            inst = square_instance(i, depth.shape, 0, 10 * i, size)
            depth[inst.mask] = d
            insts.append(inst)
        out = assign_layers(InstanceSet(insts), depth, PipelineConfig(two_layer_mode=two_layer))
        assert out.foreground_ids
        assert out.foreground_ids | out.background_ids == set(range(len(specs)))
        assert not out.foreground_ids & out.background_ids


class TestFallbackSegmenter:
    def test_constant_fails(self):
        with pytest.raises(EmptyInputError):
            instances_from_depth(np.full((20, 20), 0.3))

    def test_single_square(self):
        depth = np.zeros((40, 40))
        depth[5:15, 20:30] = 1.0
        insts = instances_from_depth(depth)
        assert len(insts) == 1 and insts[0].area == 100

    def test_matches_flood_fill(self):
        depth = np.zeros((50, 50))
        depth[2:12, 2:14] = 0.8
        depth[30:45, 20:24] = 0.6
        depth[30:45, 24:40] = 0.7  # touches the previous block: one component
        depth[0:3, 45:48] = 0.9  # 9 px, below the size floor
        insts = instances_from_depth(depth)
        comps = [c for c in flood_fill_components(depth > np.median(depth)) if len(c) >= 64]
        got = sorted(sorted(map(tuple, np.argwhere(i.mask))) for i in insts)
        assert got == sorted(sorted(c) for c in comps)
        assert len(insts) == 2


def test_two_layer_shape_mismatch():
    inst = square_instance(0, (5, 5), 0, 0, 2)
    with pytest.raises(GeometryError):
        two_layer_split(InstanceSet([inst]), [RankedInstance(inst, (0.5, 0.5), 0.4)], np.zeros((4, 4)))
