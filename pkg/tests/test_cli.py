import numpy as np

from latent_align.cli import main
from latent_align.embedding_io import read_model


def test_synth_and_align(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["synth", str(a), str(b), "--n", "300", "--m", "20", "--intrinsic-dim", "3",
                 "--sigma", "0.1", "--seed", "4"]) == 0
    assert read_model(a).n == 300
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(f"models = {a},{b}\nneighborhood_size = 40\nd = 5\n")
    out = tmp_path / "out"
    rc = main(["align", "--config", str(cfg), "--k-values", "2,5,10", "--backend", "lle",
               "--latent", "on", "--mu", "0.4", "--out", str(out)])
    assert rc == 0
    text = (out / "alignment.csv").read_text()
    assert text.startswith("# seed=0\n")
    assert len([l for l in text.splitlines() if not l.startswith("#")]) == 1 + 6


def test_all_subcommands(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    common = ["--n", "200", "--m", "10", "--intrinsic-dim", "3", "--sample-count", "10"]
    assert main(["synth", str(a), str(b), *common]) == 0
    assert main(["stability", "--models", f"{a},{b}", "--k-values", "3,5",
                 "--out", str(tmp_path / "s"), *common]) == 0
    assert main(["latent", "--center", "w1", "--epsilon", "0.4", "--out", str(tmp_path / "l"),
                 *common]) == 0
    assert main(["metrics", "--high", str(a), "--low", str(b), "--k-values", "2,4",
                 "--out", str(tmp_path / "m"), *common]) == 0
    for path in ("s/stability.csv", "s/stability_summary.csv", "l/latent.txt",
                 "l/latent_provenance.csv", "m/metrics_tc.csv", "m/metrics_overlap.csv"):
        assert (tmp_path / path).exists()


def test_error_exit_one_line(tmp_path, capsys):
    rc = main(["align", "--models", str(tmp_path / "missing.txt")])
    assert rc == 1
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and "error" in err
