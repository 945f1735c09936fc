import json
from pathlib import Path

import pytest

import fnreuse

DATA = Path(__file__).resolve().parents[2] / "tests" / "data" / "worked_example"

QUERY = (
    "The generated function handler responds to S3 events on an Amazon S3 bucket and if the object is a png "
    "or jpg file uses Amazon Rekognition to detect labels. Once the labels are found it adds them as tags to "
    "the S3 Object."
)


def test_set_metrics():
    assert fnreuse.jaccard_distance({"AWS S3", "AWS SNS"}, {"aws s3"}) == pytest.approx(0.5)
    assert fnreuse.subset_coverage({"AWS S3", "AWS SNS"}, {"AWS S3"}) == pytest.approx(0.5)
    with pytest.raises(fnreuse.ValidationError):
        fnreuse.subset_coverage(set(), {"AWS S3"})


def test_pareto_front():
    pts = [fnreuse.ObjectiveVector(*p) for p in [(0.5, 0.5), (0.6, 0.5), (1.0, 1.0), (0.5, 0.5)]]
    assert fnreuse.pareto_front(pts) == [0, 3]
    assert fnreuse.dominates(pts[0], pts[1])


def test_recommend_prunes_and_ranks():
    emb = lambda t: fnreuse.embed(t, 64)
    rep = fnreuse.SemanticRepresentation
    reps = {
        "a": rep("a", "tag images in a bucket", {"AWS Lambda"}, {"AWS S3", "AWS Rekognition"}, {"Python"}, emb("tag images in a bucket")),
        "b": rep("b", "resize images", {"AWS Lambda"}, {"AWS S3"}, {"Python"}, emb("resize images")),
        "c": rep("c", "send mail", {"AWS Lambda"}, {"AWS SES"}, {"Python"}, emb("send mail")),
    }
    query = rep("q", "tag images", {"AWS Lambda"}, {"AWS S3", "AWS Rekognition"}, set(), emb("tag images"))
    rec = fnreuse.recommend(query, reps, 5)
    assert rec.candidates.ids == ["a", "b"]
    assert rec.similarity_evaluations == 2
    assert rec.ranking.ids()[0] == "a"
    assert [lvl.applied for lvl in rec.candidates.levels] == [True, True, False]
    assert json.loads(rec.trace_json(False))["latency_ms"] is None


def test_parse_extraction_and_stemmer():
    raw = fnreuse.parse_extraction(
        "Intent Summary: Tags images.\nServerless Platforms: AWS Lambda\n"
        "Cloud Services: S3, Rekognition\nProgramming Languages: C#"
    )
    assert raw.services == {"S3", "Rekognition"}
    assert raw.languages == {"C#"}
    with pytest.raises(fnreuse.MalformedResponseError):
        fnreuse.parse_extraction("Intent Summary: only this")
    assert fnreuse.porter_stem("generalization") == "gener"
    assert fnreuse.keyword_preprocess("This example demonstrates usage") == ["exampl", "demonstr", "usag"]


def test_metrics():
    cases = [fnreuse.QueryCase("q0", "t", "f1"), fnreuse.QueryCase("q1", "t", "f2")]
    rankings = {
        "q0": fnreuse.make_ranking("q0", [fnreuse.scored("f1", 0.9), fnreuse.scored("x", 0.5)], 10),
        "q1": fnreuse.make_ranking("q1", [fnreuse.scored("x", 0.9), fnreuse.scored("f2", 0.5)], 10),
    }
    assert fnreuse.recall_at_k(rankings, cases, [1, 10]) == {1: 50.0, 10: 100.0}
    assert fnreuse.mrr_at_k(rankings, cases, [10])[10] == pytest.approx(0.75)


def test_cli_end_to_end(tmp_path):
    repo, reprs = str(tmp_path / "repo.json"), str(tmp_path / "reprs.jsonl")
    fixture = str(DATA / "extractions.jsonl")
    code, out, _ = fnreuse.run_cli(["ingest", "--manifest", str(DATA / "manifest.jsonl"), "--repo", repo])
    assert code == 0 and out.startswith("kept=12 rejected=2")
    code, _, _ = fnreuse.run_cli(["extract", "--repo", repo, "--reprs", reprs, "--fixture", fixture])
    assert code == 0
    code, out, _ = fnreuse.run_cli(
        ["query", "--text", QUERY, "--query-id", "q-s3-rekognition", "--reprs", reprs, "--fixture", fixture,
         "--trace", "--no-latency"]
    )
    assert code == 0
    assert json.loads(out)["ranking"][0]["id"] == "aws-s3-rekognition-tagging"
    assert len(fnreuse.load_repr_store(reprs)) == 12
    assert fnreuse.run_cli(["bogus"])[0] == 2
