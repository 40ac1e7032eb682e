import pytest

from smspike.config import ConfigError, SolverConfig, parse_shape
from smspike.mesh import build_domain


def test_text_roundtrip_and_hash():
    cfg = SolverConfig(eps=0.03, shape="torus:major=0.3,minor=0.17", seed=7)
    back = SolverConfig.from_text(cfg.to_text())
    assert back == cfg
    assert back.config_hash() == cfg.config_hash()
    assert cfg.with_(seed=8).config_hash() != cfg.config_hash()


def test_comments_and_errors(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# run\neps = 0.04  # small\nmultistart=3\n")
    cfg = SolverConfig.load(p)
    assert cfg.eps == 0.04 and cfg.multistart == 3
    for bad in ("eps", "nope=1", "eps=abc"):
        with pytest.raises(ConfigError):
            SolverConfig.from_text(bad)


def test_validation():
    with pytest.raises(ConfigError):
        SolverConfig(p=6.0).validate()
    with pytest.raises(ConfigError):
        SolverConfig(eps=-1).validate()
    with pytest.raises(ConfigError):
        SolverConfig(quadrature="simpson").validate()
    g = build_domain("ball", 32, radius=0.45)
    with pytest.raises(ConfigError):
        SolverConfig(eps=g.h).validate(g)
    with pytest.raises(ConfigError):
        SolverConfig(eps=0.1, r=0.2).validate(g)
    SolverConfig(eps=0.1, r=0.2).validate(g, scale=False)
    assert SolverConfig(r=0).radius(g) == pytest.approx(g.inradius / 3)


def test_parse_shape():
    assert parse_shape("ball:radius=0.4") == ("ball", {"radius": 0.4})
    tag, kw = parse_shape("slab:box_size=1/1/0.25")
    assert tag == "slab" and kw["box_size"] == [1.0, 1.0, 0.25]
    with pytest.raises(ConfigError):
        parse_shape("ball:radius")
