import numpy as np
import pytest

from gridspread.profiles import (
    BehaviorProfile,
    LikertDistributions,
    ProfileFormatError,
    ProfileSet,
    assign_profiles,
    default_distributions,
    likert_to_probability,
    load_profiles,
    synthesize_profiles,
    write_profiles,
)
from gridspread.social_graph import generate_scale_free


def ic_profile(**kw):
    base = dict(model="IC", follow_stranger=0.5, forward_stranger=0.3,
                follow_friend=0.7, forward_friend=0.4)
    base.update(kw)
    return BehaviorProfile(**base)


def lt_profile(**kw):
    base = dict(model="LT", follow_stranger=0.5, forward_stranger=0.3,
                threshold_follow=2, threshold_forward=3)
    base.update(kw)
    return BehaviorProfile(**base)


def test_likert_mapping_exact():
    for x in range(11):
        assert likert_to_probability(x) == x / 10


@pytest.mark.parametrize("bad", [-1, 11, 2.5, "3", True])
def test_likert_rejects(bad):
    with pytest.raises(ValueError):
        likert_to_probability(bad)


def test_profile_validation():
    with pytest.raises(ValueError, match="follow_friend"):
        BehaviorProfile(model="IC", follow_stranger=0.5, forward_stranger=0.5)
    with pytest.raises(ValueError, match="threshold"):
        BehaviorProfile(model="LT", follow_stranger=0.5, forward_stranger=0.5)
    with pytest.raises(ValueError, match="probability"):
        ic_profile(follow_stranger=1.2)
    with pytest.raises(ValueError, match="threshold_follow"):
        lt_profile(threshold_follow=-1)
    with pytest.raises(ValueError, match="model"):
        BehaviorProfile(model="XX", follow_stranger=0.5, forward_stranger=0.5)


def test_profile_set_rules():
    with pytest.raises(ValueError, match="no profiles"):
        ProfileSet(())
    with pytest.raises(ValueError, match="mixed"):
        ProfileSet((ic_profile(), lt_profile()))
    s = ProfileSet((ic_profile(), ic_profile(follow_friend=0.2)))
    assert s.model == "IC"
    assert len(s) == 2
    assert s.field_array("follow_friend").tolist() == [0.7, 0.2]
    with pytest.raises(ValueError, match="threshold_follow"):
        s.field_array("threshold_follow")


def test_csv_roundtrip(tmp_path):
    ic = ProfileSet((
        ic_profile(follow_stranger=0.0, forward_stranger=1.0),
        ic_profile(follow_friend=1.0, forward_friend=0.1),
    ))
    path = tmp_path / "ic.csv"
    write_profiles(ic, path)
    back = load_profiles(path)
    assert back.model == "IC"
    assert len(back) == 2
    for orig, rt in zip(ic.profiles, back.profiles):
        for f in ("follow_stranger", "forward_stranger", "follow_friend", "forward_friend"):
            assert getattr(orig, f) == pytest.approx(getattr(rt, f))

    lt = ProfileSet((lt_profile(), lt_profile(threshold_follow=0)))
    path = tmp_path / "lt.csv"
    write_profiles(lt, path)
    back = load_profiles(path)
    assert back.model == "LT"
    assert [p.threshold_follow for p in back.profiles] == [2, 0]
    assert [p.threshold_forward for p in back.profiles] == [3, 3]


def test_write_rejects_non_likert_probability(tmp_path):
    s = ProfileSet((ic_profile(follow_stranger=0.55),))
    with pytest.raises(ValueError, match="multiple"):
        write_profiles(s, tmp_path / "x.csv")


HEADER = ("participant_id,model,condition,follow_stranger,forward_stranger,"
          "follow_friend,forward_friend,threshold_follow,threshold_forward")


def test_load_errors(tmp_path):
    p = tmp_path / "p.csv"

    p.write_text("")
    with pytest.raises(ProfileFormatError, match="no profiles"):
        load_profiles(p)

    p.write_text(HEADER + "\n")
    with pytest.raises(ProfileFormatError, match="no profiles"):
        load_profiles(p)

    p.write_text("a,b\n1,2\n")
    with pytest.raises(ProfileFormatError, match="bad header"):
        load_profiles(p)

    p.write_text(HEADER + "\np1,IC,without_link,5,3,7\n")
    with pytest.raises(ProfileFormatError, match="row 2"):
        load_profiles(p)

    p.write_text(HEADER + "\np1,IC,without_link,11,3,7,4,,\n")
    with pytest.raises(ProfileFormatError, match="follow_stranger"):
        load_profiles(p)

    p.write_text(HEADER + "\np1,LT,without_link,5,3,,,x,2\n")
    with pytest.raises(ProfileFormatError, match="threshold_follow"):
        load_profiles(p)

    p.write_text(HEADER + "\np1,ZZ,without_link,5,3,7,4,,\n")
    with pytest.raises(ProfileFormatError, match="model"):
        load_profiles(p)

    p.write_text(HEADER + "\np1,IC,without_link,5,3,7,4,,\n"
                 "p2,LT,without_link,5,3,,,1,2\n")
    with pytest.raises(ProfileFormatError, match="mixed"):
        load_profiles(p)


def test_synthesize_profiles():
    dist = default_distributions("IC")
    s1 = synthesize_profiles(200, dist, seed=11)
    s2 = synthesize_profiles(200, dist, seed=11)
    assert len(s1) == 200
    assert s1.model == "IC"
    assert all(a == b for a, b in zip(s1.profiles, s2.profiles))
    # every sampled value is a Likert multiple
    for p in s1.profiles:
        for f in ("follow_stranger", "forward_stranger", "follow_friend", "forward_friend"):
            v = getattr(p, f)
            assert abs(v * 10 - round(v * 10)) < 1e-12

    lt = synthesize_profiles(100, default_distributions("LT"), seed=4)
    assert lt.model == "LT"
    assert all(p.threshold_follow >= 0 for p in lt.profiles)


def test_synthesize_shared_threshold():
    dist = LikertDistributions(
        model="LT",
        follow_stranger=tuple([1.0] + [0.0] * 10),
        forward_stranger=tuple([1.0] + [0.0] * 10),
        threshold_follow={1: 0.5, 2: 0.5},
        shared_threshold=True)
    s = synthesize_profiles(50, dist, seed=9)
    assert all(p.threshold_follow == p.threshold_forward for p in s.profiles)


def test_distribution_validation():
    with pytest.raises(ValueError, match="11 bins"):
        LikertDistributions(model="IC", follow_stranger=(1.0,),
                            forward_stranger=tuple([1.0] + [0.0] * 10),
                            follow_friend=tuple([1.0] + [0.0] * 10),
                            forward_friend=tuple([1.0] + [0.0] * 10)).validate()
    with pytest.raises(ValueError, match="sum to 1"):
        LikertDistributions(model="IC",
                            follow_stranger=tuple([0.5] + [0.0] * 10),
                            forward_stranger=tuple([1.0] + [0.0] * 10),
                            follow_friend=tuple([1.0] + [0.0] * 10),
                            forward_friend=tuple([1.0] + [0.0] * 10)).validate()
    for model in ("IC", "LT"):
        for with_link in (False, True):
            default_distributions(model, with_link).validate()


def test_assign_profiles():
    net = generate_scale_free(500, 2, seed=1)
    pset = synthesize_profiles(40, default_distributions("IC"), seed=2)
    asg = assign_profiles(net, pset, seed=3)
    assert asg.indices.shape == (500,)
    assert asg.indices.min() >= 0 and asg.indices.max() < 40
    assert asg.model == "IC"
    arr = asg.param("follow_stranger")
    assert arr.shape == (500,)
    v = 17
    assert arr[v] == asg.profile_of(v).follow_stranger
    again = assign_profiles(net, pset, seed=3)
    assert np.array_equal(asg.indices, again.indices)
