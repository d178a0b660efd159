import pytest

from beamplot.spec import FigureSpecError, load_figure_spec

MINIMAL = """\
inputs = ["data.csv"]
scenarios = ["s1"]
output = "out.png"
"""


def write(tmp_path, text):
    path = tmp_path / "fig.toml"
    path.write_text(text)
    return path


def test_minimal_spec(tmp_path):
    spec = load_figure_spec(write(tmp_path, MINIMAL))
    assert spec.inputs == (tmp_path / "data.csv",)
    assert spec.scenarios == ("s1",)
    assert spec.output == tmp_path / "out.png"
    assert spec.markers == ()
    assert not spec.mu_panel


def test_paths_resolve_against_spec_folder(tmp_path):
    nested = tmp_path / "specs"
    nested.mkdir()
    path = nested / "fig.toml"
    path.write_text(MINIMAL)
    spec = load_figure_spec(path)
    assert spec.inputs[0].parent == nested


def test_full_spec(tmp_path):
    text = MINIMAL + """\
title = "hello"
x_range = [1, 2000]
y_range = [-10, 25]
markers = [1000]
mu_panel = true

[styles.mass]
label = "MASS"
color = "#123456"
linestyle = "--"
"""
    spec = load_figure_spec(write(tmp_path, text))
    assert spec.x_range == (1.0, 2000.0)
    assert spec.markers == (1000,)
    assert spec.mu_panel
    assert spec.style_for("mass").color == "#123456"
    # unknown mechanisms fall back to a bare label
    assert spec.style_for("other").label == "other"


def test_default_styles_cover_known_mechanisms(tmp_path):
    spec = load_figure_spec(write(tmp_path, MINIMAL))
    labels = {spec.style_for(k).label for k in ("fss", "ass", "mass", "taass")}
    assert labels == {"FSS", "ASS", "MASS", "TAASS"}


@pytest.mark.parametrize(
    "mutation,match",
    [
        ("inputs = []\nscenarios = [\"s\"]\noutput = \"o.png\"\n", "inputs"),
        ("inputs = [\"d.csv\"]\noutput = \"o.png\"\n", "scenarios"),
        ("inputs = [\"d.csv\"]\nscenarios = [\"s\"]\n", "output"),
        (MINIMAL + "typo = 1\n", "unknown key 'typo'"),
        (MINIMAL + "x_range = [5, 1]\n", "x_range"),
        (MINIMAL + "markers = [0]\n", "markers"),
        (MINIMAL + "mu_panel = 3\n", "mu_panel"),
        (MINIMAL + "[styles.mass]\nwidth = 3\n", "unknown key 'width'"),
    ],
)
def test_invalid_specs(tmp_path, mutation, match):
    with pytest.raises(FigureSpecError, match=match):
        load_figure_spec(write(tmp_path, mutation))


def test_missing_file(tmp_path):
    with pytest.raises(FigureSpecError, match="cannot read"):
        load_figure_spec(tmp_path / "absent.toml")


def test_invalid_toml(tmp_path):
    with pytest.raises(FigureSpecError, match="not valid TOML"):
        load_figure_spec(write(tmp_path, "inputs = [\n"))
