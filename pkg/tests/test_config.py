import pytest

from nnem import NNEMFactory, create_components
from nnem.config import SCHEMA, flatten, load_config, load_defaults
from nnem.errors import ConfigError


def _write(tmp_path, text):
    path = tmp_path / "run.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_cover_the_schema():
    assert set(load_defaults()) == set(SCHEMA)
    config = load_config()
    assert config["mesh.kind"] == "unit_square"
    assert config["quad.triangle_points"] == 36
    assert config["quad.edge_points"] == 6
    assert config["train.lr"] == pytest.approx(3e-4)
    assert config["study.sizes"] == [2, 4, 8]
    assert config["deterministic"] is True


def test_flatten():
    assert flatten({"train": {"lr": 1, "seed": 2}, "threads": 0}) == {"train.lr": 1, "train.seed": 2, "threads": 0}


def test_file_overrides_defaults(tmp_path):
    path = _write(tmp_path, "train:\n  steps: 50\n  lr: 3e-4\nenvelope:\n  kind: hierarchical\n")
    config = load_config(path)
    assert config["train.steps"] == 50
    assert config["train.lr"] == pytest.approx(3e-4)
    assert config["envelope.kind"] == "hierarchical"
    assert config["net.width"] == 16


def test_overrides_win_over_file(tmp_path):
    path = _write(tmp_path, "train:\n  seed: 1\n")
    config = load_config(path, {"train.seed": 7, "output.dir": None})
    assert config["train.seed"] == 7
    assert config["output.dir"] == "runs"


@pytest.mark.parametrize(
    "text, key",
    [
        ("train:\n  lrr: 0.1\n", "train.lrr"),
        ("train:\n  steps: -1\n", "train.steps"),
        ("train:\n  steps: 1.5\n", "train.steps"),
        ("train:\n  lr: 0\n", "train.lr"),
        ("train:\n  lr: fast\n", "train.lr"),
        ("envelope:\n  order: 4\n", "envelope.order"),
        ("space:\n  augment_constant: 1\n", "space.augment_constant"),
        ("study:\n  sizes: []\n", "study.sizes"),
        ("study:\n  sizes: [2, 0]\n", "study.sizes"),
        ("study:\n  methods: [fem, pinn]\n", "study.methods"),
        ("mesh:\n  kind: file\n", "mesh.path"),
        ("quad:\n  edge_points: 65\n", "quad.edge_points"),
    ],
)
def test_invalid_values_name_the_key(tmp_path, text, key):
    with pytest.raises(ConfigError) as err:
        load_config(_write(tmp_path, text))
    assert err.value.key == key
    assert key in str(err.value)


def test_unreadable_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "train: [unclosed\n"))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "- 1\n- 2\n"))


def test_default_components():
    components = create_components()
    assert components.mesh.n_triangles == 8
    assert components.rule.size == 36
    assert components.problem.name == "laplace_sine"
    assert components.space.dimension == 18
    assert components.train_config.max_steps == 0
    assert components.train_config.lift == "constant"


def test_factory_choices(tmp_path):
    factory = NNEMFactory(load_config(overrides={"mesh.kind": "l_shape", "mesh.n": 1, "envelope.kind": "hierarchical"}))
    mesh = factory.create_mesh()
    assert mesh.n_triangles == 6
    family = factory.create_family()
    assert factory.create_space(mesh, family, factory.create_problem()).dimension == 22
    assert factory.create_mesh(n=2).n_triangles == 24

    nonhomogeneous = NNEMFactory(load_config(overrides={"problem.name": "linear_xy"}))
    components = nonhomogeneous.create_components()
    assert components.space.bc == "nonhomogeneous"


def test_factory_rejects_bad_rule_and_mesh(tmp_path):
    with pytest.raises(ConfigError) as err:
        NNEMFactory(load_config(overrides={"quad.triangle_points": 10})).create_rule()
    assert err.value.key == "quad.triangle_points"
    config = load_config(overrides={"mesh.kind": "file", "mesh.path": str(tmp_path / "none.mesh")})
    with pytest.raises(ConfigError) as err:
        NNEMFactory(config).create_mesh()
    assert err.value.key == "mesh.path"
    with pytest.raises(ConfigError):
        NNEMFactory(load_config(overrides={"problem.name": "unknown"})).create_problem()
