import numpy as np
import pytest

from stancenet.data import COLUMNS, PostFileError, PostTable, load_posts, save_posts


def table():
    return PostTable(
        post_ids=["p1", "p2", "p3"],
        user_ids=["u1", "u1", "u2"],
        targets=["trump", "sanders", "trump"],
        stances=np.array([0, 1, 1], dtype=np.int64),
        texts=["all good", "not great", "mixed feelings"],
    )


def test_round_trip(tmp_path):
    path = tmp_path / "posts.tsv"
    save_posts(path, table())
    t2 = load_posts(path)
    t1 = table()
    assert t2.post_ids == t1.post_ids
    assert t2.user_ids == t1.user_ids
    assert t2.targets == t1.targets
    assert np.array_equal(t2.stances, t1.stances)
    assert t2.texts == t1.texts


def test_header_is_checked(tmp_path):
    path = tmp_path / "posts.tsv"
    path.write_text("wrong\theader\n")
    with pytest.raises(PostFileError):
        load_posts(path)


def test_field_count_checked(tmp_path):
    path = tmp_path / "posts.tsv"
    path.write_text("\t".join(COLUMNS) + "\np1\tu1\ttrump\tfavor\n")
    with pytest.raises(PostFileError):
        load_posts(path)


def test_duplicate_post_id_rejected(tmp_path):
    path = tmp_path / "posts.tsv"
    path.write_text("\t".join(COLUMNS) +
                    "\np1\tu1\ttrump\tfavor\thello\np1\tu2\ttrump\tagainst\tbye\n")
    with pytest.raises(PostFileError):
        load_posts(path)


def test_stance_parse_is_case_insensitive(tmp_path):
    path = tmp_path / "posts.tsv"
    path.write_text("\t".join(COLUMNS) +
                    "\np1\tu1\ttrump\tFAVOR\thello\np2\tu2\ttrump\tAgainst\tbye\n")
    t = load_posts(path)
    assert t.stances.tolist() == [0, 1]


def test_unknown_stance_rejected(tmp_path):
    path = tmp_path / "posts.tsv"
    path.write_text("\t".join(COLUMNS) + "\np1\tu1\ttrump\tneutral\thello\n")
    with pytest.raises(PostFileError):
        load_posts(path)


def test_save_rejects_embedded_tabs(tmp_path):
    t = table()
    t.texts[0] = "has\ttab"
    with pytest.raises(ValueError):
        save_posts(tmp_path / "posts.tsv", t)


def test_subset_and_target_lookup():
    t = table()
    sub = t.subset(np.array([0, 2]))
    assert sub.post_ids == ["p1", "p3"]
    assert sub.stances.tolist() == [0, 1]
    assert t.indices_for_target("trump").tolist() == [0, 2]
    assert t.target_names() == ["trump", "sanders"]
