import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poisswell.config import RunConfig, parse_config, serialize_config
from poisswell.errors import ParseError, PoisswellError, ValidationError
from poisswell.grid import Grid
from poisswell.io import (
    Manifest,
    read_field,
    read_jsonl,
    records_to_csv,
    write_field,
    write_jsonl,
)

from conftest import random_band_limited

MINIMAL = """
[run]
kind = wkb

[grid]
points = [64]
"""

LADDER = """
[run]
kind = ladder
seed = 3

[grid]
points = [128]

[params]
epsilon = 0.1
T = 0.3

[initial]
family = gaussian-bump
amplitude = 0.2

[ladder]
epsilons = [0.4, 0.2, 0.1]
"""


class TestParse:
    def test_minimal_fills_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.kind == "wkb"
        assert cfg.points == (64,)
        assert cfg.epsilon == 0.1
        assert cfg.T == 0.5
        assert cfg.family == "gaussian-bump"

    def test_ladder_config(self):
        cfg = parse_config(LADDER)
        assert cfg.kind == "ladder"
        assert cfg.epsilons == (0.4, 0.2, 0.1)
        assert cfg.family_options == {"amplitude": 0.2}

    def test_negative_epsilon_names_key(self):
        bad = MINIMAL + "\n[params]\nepsilon = -1\n"
        with pytest.raises(ValidationError) as err:
            parse_config(bad)
        assert "epsilon" in str(err.value)

    def test_increasing_ladder_rejected(self):
        bad = LADDER.replace("[0.4, 0.2, 0.1]", "[0.1, 0.2]")
        with pytest.raises(ValidationError) as err:
            parse_config(bad)
        assert "decreasing" in str(err.value)

    def test_parse_error_carries_line(self):
        bad = "[run]\nkind = wkb\nthis line is junk\n"
        with pytest.raises(ParseError) as err:
            parse_config(bad)
        assert err.value.line == 3

    def test_unknown_family(self):
        bad = MINIMAL + "\n[initial]\nfamily = vortex\n"
        with pytest.raises(ValidationError):
            parse_config(bad)

    def test_duplicate_key_rejected(self):
        bad = "[run]\nkind = wkb\nkind = euler\n"
        with pytest.raises(ParseError):
            parse_config(bad)

    def test_comments_and_blank_lines(self):
        text = "# heading\n\n[run]\nkind = euler  # inline\n\n[grid]\npoints = [32]\n"
        cfg = parse_config(text)
        assert cfg.kind == "euler"

    def test_roundtrip(self):
        for text in (MINIMAL, LADDER):
            cfg = parse_config(text)
            again = parse_config(serialize_config(cfg))
            assert again == cfg

    def test_roundtrip_rich_config(self):
        cfg = RunConfig(
            kind="monokinetic",
            points=(128,),
            lengths=(2 * np.pi,),
            epsilon=0.05,
            dt=1e-3,
            T=0.25,
            family="gaussian-bump",
            family_options={"amplitude": 0.3, "width": 0.7},
            epsilons=(0.2, 0.1, 0.05),
            base_points=(32, 64, 96),
            out_dir="out",
            magnetic=False,
        ).validate()
        again = parse_config(serialize_config(cfg))
        assert again == cfg

    @given(
        kind=st.sampled_from(["wkb", "euler", "pauli"]),
        eps=st.floats(min_value=1e-3, max_value=2.0),
        T=st.floats(min_value=0.0, max_value=5.0),
        n=st.sampled_from([16, 32, 64, 128]),
        seed=st.integers(min_value=0, max_value=2**31 - 1),
        magnetic=st.booleans(),
        sample_every=st.integers(min_value=1, max_value=50),
    )
    @settings(max_examples=60, deadline=None)
    def test_roundtrip_property(self, kind, eps, T, n, seed, magnetic, sample_every):
        cfg = RunConfig(
            kind=kind,
            seed=seed,
            points=(n,),
            epsilon=eps,
            T=T,
            magnetic=magnetic,
            sample_every=sample_every,
        ).validate()
        assert parse_config(serialize_config(cfg)) == cfg


class TestFieldFormat:
    def test_roundtrip_spinor(self, rng):
        g = Grid((32, 16))
        psi = random_band_limited(g, rng, components=2, complex_=True)
        path = "/tmp/test_field.pwf"
        write_field(path, psi)
        snap = read_field(path)
        assert snap.rep == "physical"
        assert snap.data.shape == (2, 32, 16)
        assert np.max(np.abs(snap.data - psi)) < 1e-15

    def test_roundtrip_scalar(self, rng, tmp_path):
        g = Grid((64,))
        f = random_band_limited(g, rng)
        p = tmp_path / "scalar.pwf"
        write_field(p, f)
        snap = read_field(p)
        assert snap.data.shape == (1, 64)
        assert np.max(np.abs(snap.data[0] - f)) < 1e-15

    def test_header_magic(self, tmp_path):
        p = tmp_path / "x.pwf"
        write_field(p, np.zeros((3, 8, 8), dtype=complex), rep="spectral")
        raw = p.read_bytes()
        assert raw[:4] == b"PWF1"
        snap = read_field(p)
        assert snap.rep == "spectral"

    def test_not_a_snapshot(self, tmp_path):
        p = tmp_path / "bogus.pwf"
        p.write_bytes(b"NOPE" + b"\0" * 16)
        with pytest.raises(PoisswellError):
            read_field(p)


class TestJsonlManifest:
    def test_jsonl_roundtrip(self, tmp_path):
        p = tmp_path / "records.jsonl"
        docs = [{"t": 0.0, "charge": 1.0}, {"t": 0.1, "charge": 1.0, "energy": None}]
        write_jsonl(p, docs)
        assert read_jsonl(p) == docs

    def test_csv_union_of_keys(self, tmp_path):
        p = tmp_path / "records.csv"
        records_to_csv(p, [{"a": 1.0}, {"b": 2.0, "a": 3.0}])
        lines = p.read_text().splitlines()
        assert lines[0] == "a,b"
        assert lines[1] == "1,"

    def test_manifest_registers_everything(self, tmp_path):
        m = Manifest(tmp_path)
        m.path("one.json", "report")
        m.path("two.csv", "csv")
        mpath = m.write()
        doc = json.loads(mpath.read_text())
        paths = {e["path"] for e in doc["artifacts"]}
        assert paths == {"one.json", "two.csv"}
