"""Document round-trips, canonical form, and record-indexed errors."""

from __future__ import annotations

import json

import pytest

from mmkit import (
    InterchangeError,
    Model,
    built_in_registry,
    export_metamodel,
    export_model,
    import_metamodel,
    import_model,
    import_vcs_log,
    tag,
)

from oracles import random_documented_model, random_metamodel


REGISTRY = built_in_registry()


class TestModelDocuments:
    def test_canonical_shape(self, vcs_model):
        model, by = vcs_model
        doc = json.loads(export_model(model))
        assert list(doc) == ["formatVersion", "metamodel", "entities", "links", "tags"]
        assert doc["formatVersion"] == "1.0"
        assert doc["metamodel"] == "vcs"
        assert [e["id"] for e in doc["entities"]] == sorted(
            e["id"] for e in doc["entities"]
        )
        assert doc["links"] == sorted(
            doc["links"], key=lambda l: (l["source"], l["slot"], l["target"])
        )

    def test_links_are_stored_once_from_the_primary_end(self, vcs_model):
        model, by = vcs_model
        doc = json.loads(export_model(model))
        slots = {l["slot"] for l in doc["links"]}
        assert slots == {"commits", "author"}
        assert len(doc["links"]) == model.link_count()

    def test_unset_properties_are_omitted(self, vcs_model):
        model, by = vcs_model
        doc = json.loads(export_model(model))
        commit_record = next(e for e in doc["entities"] if e["id"] == by["c1"].id)
        assert "date" not in commit_record
        assert commit_record["message"] == "change 1"

    def test_export_import_export_is_byte_identical(self, vcs_model):
        model, _ = vcs_model
        tag(model, "hot", [2], color="#ff0000")
        first = export_model(model)
        second = export_model(import_model(first, REGISTRY))
        assert second == first

    def test_round_trip_preserves_source_files_and_tags(self):
        model = random_documented_model(7)
        text = export_model(model)
        back = import_model(
            text, {model.metamodel.name: model.metamodel, **REGISTRY}
        )
        assert back.source_texts == model.source_texts
        assert {t.name: t.members for t in back.tags.values()} == {
            t.name: t.members for t in model.tags.values()
        }

    def test_import_rejects_unknown_metamodel(self):
        doc = '{"formatVersion":"1.0","metamodel":"nope","entities":[]}'
        with pytest.raises(InterchangeError, match="unknown meta-model 'nope'"):
            import_model(doc, REGISTRY)

    def test_import_rejects_version_drift(self):
        with pytest.raises(InterchangeError, match="unsupported format version"):
            import_model('{"formatVersion":"2.0","metamodel":"vcs"}', REGISTRY)
        with pytest.raises(InterchangeError, match="unsupported format version"):
            import_model('{"metamodel":"vcs"}', REGISTRY)

    def test_import_rejects_non_object_root(self):
        with pytest.raises(InterchangeError, match="root must be an object"):
            import_model("[1,2]", REGISTRY)
        with pytest.raises(InterchangeError, match="invalid JSON"):
            import_model("{", REGISTRY)

    def test_entity_errors_carry_the_record_index(self):
        doc = json.dumps(
            {
                "formatVersion": "1.0",
                "metamodel": "vcs",
                "entities": [
                    {"id": 1, "type": "Author", "name": "a"},
                    {"id": 2, "type": "Commit", "name": "oops"},
                ],
            }
        )
        with pytest.raises(InterchangeError) as err:
            import_model(doc, REGISTRY)
        assert (
            str(err.value)
            == "unknown slot 'name' on type 'Commit' (entity index 1)"
        )

    def test_ids_must_be_strictly_increasing(self):
        doc = json.dumps(
            {
                "formatVersion": "1.0",
                "metamodel": "vcs",
                "entities": [
                    {"id": 2, "type": "Author"},
                    {"id": 2, "type": "Author"},
                ],
            }
        )
        with pytest.raises(InterchangeError, match="strictly increasing"):
            import_model(doc, REGISTRY)

    def test_unknown_entity_type_with_index(self):
        doc = json.dumps(
            {
                "formatVersion": "1.0",
                "metamodel": "vcs",
                "entities": [{"id": 1, "type": "Wombat"}],
            }
        )
        with pytest.raises(
            InterchangeError, match=r"unknown type 'Wombat' \(entity index 0\)"
        ):
            import_model(doc, REGISTRY)

    def test_link_errors_carry_the_record_index(self):
        doc = json.dumps(
            {
                "formatVersion": "1.0",
                "metamodel": "vcs",
                "entities": [{"id": 1, "type": "Author"}],
                "links": [{"slot": "commits", "source": 1, "target": 9}],
            }
        )
        with pytest.raises(InterchangeError, match=r"\(link index 0\)"):
            import_model(doc, REGISTRY)

    def test_tag_errors_carry_the_record_index(self):
        doc = json.dumps(
            {
                "formatVersion": "1.0",
                "metamodel": "vcs",
                "entities": [{"id": 1, "type": "Author"}],
                "tags": [{"name": "x", "members": [4]}],
            }
        )
        with pytest.raises(InterchangeError, match=r"\(tag index 0\)"):
            import_model(doc, REGISTRY)


class TestMetaModelDocuments:
    def test_round_trip_reproduces_every_slot_table(self):
        for seed in range(8):
            original = random_metamodel(seed)
            text = export_metamodel(original)
            rebuilt = import_metamodel(text, REGISTRY)
            assert rebuilt.name == original.name
            for name, cls in original.classes.items():
                assert rebuilt.classes[name].slot_table == cls.slot_table
            for name, trait in original.traits.items():
                assert rebuilt.traits[name].slot_table == trait.slot_table

    def test_document_is_stable_under_round_trip(self):
        original = random_metamodel(3)
        text = export_metamodel(original)
        again = export_metamodel(import_metamodel(text, REGISTRY))
        assert again == text

    def test_resolutions_survive(self, std):
        from mmkit import MetaModelBuilder

        builder = MetaModelBuilder("ext", imports=[std])
        cls = builder.new_class("Thing")
        named = std.require_type("TNamedEntity")
        sourced = std.require_type("TSourceAnchor")
        builder.add_generalization(cls, named)
        builder.add_generalization(cls, sourced)
        builder.alias_slot(cls, sourced, "file", "path")
        original = builder.generate()
        rebuilt = import_metamodel(
            export_metamodel(original), {"std": std}
        )
        assert rebuilt.classes["Thing"].slot_table == original.classes[
            "Thing"
        ].slot_table
        assert "path" in rebuilt.classes["Thing"].slot_table.slot_names

    def test_unknown_import_is_an_error(self):
        doc = '{"formatVersion":"1.0","name":"x","imports":["missing"]}'
        with pytest.raises(InterchangeError, match="unknown import 'missing'"):
            import_metamodel(doc, REGISTRY)

    def test_bad_association_record(self):
        doc = json.dumps(
            {
                "formatVersion": "1.0",
                "name": "x",
                "imports": [],
                "classes": [{"name": "A"}],
                "associations": [
                    {"a": "A", "b": "A", "shape": "sideways", "nameA": "l", "nameB": "r"}
                ],
            }
        )
        with pytest.raises(InterchangeError, match="bad association record"):
            import_metamodel(doc, REGISTRY)

    def test_bad_property_kind(self):
        doc = json.dumps(
            {
                "formatVersion": "1.0",
                "name": "x",
                "imports": [],
                "classes": [
                    {"name": "A", "properties": [{"name": "p", "kind": "Float"}]}
                ],
            }
        )
        with pytest.raises(InterchangeError, match="bad property record"):
            import_metamodel(doc, REGISTRY)


VCS_CSV = """revision,date,author,message,files
1,2024-01-02,alice,first,"src/main.c;src/util.c"
2,2024-01-03,bob,fix,src/main.c
3,2024-01-05,alice,"tidy, then ship",src/util.c
"""


class TestCommitLogImport:
    def test_entities_and_links(self):
        model = import_vcs_log(VCS_CSV)
        commits = [e for e in model.entities.values() if e.type.name == "Commit"]
        authors = {
            e.name_or_empty(): e
            for e in model.entities.values()
            if e.type.name == "Author"
        }
        files = {
            e.name_or_empty(): e
            for e in model.entities.values()
            if e.type.name == "File"
        }
        assert len(commits) == 3
        assert set(authors) == {"alice", "bob"}
        assert set(files) == {"src/main.c", "src/util.c"}
        assert len(authors["alice"].linked("commits")) == 2
        assert len(files["src/main.c"].linked("commits")) == 2

    def test_quoted_fields_survive(self):
        model = import_vcs_log(VCS_CSV)
        messages = {
            e.get_property("message")
            for e in model.entities.values()
            if e.type.name == "Commit"
        }
        assert "tidy, then ship" in messages

    def test_reimport_of_the_export_round_trips(self):
        model = import_vcs_log(VCS_CSV)
        text = export_model(model)
        assert export_model(import_model(text, REGISTRY)) == text

    def test_header_is_checked(self):
        with pytest.raises(InterchangeError, match="unexpected header"):
            import_vcs_log("rev,who\n1,alice\n")
        with pytest.raises(InterchangeError, match="missing header"):
            import_vcs_log("")

    def test_row_errors_carry_the_line_number(self):
        bad_width = "revision,date,author,message,files\n1,2024-01-02,alice\n"
        with pytest.raises(InterchangeError, match=r"\(line 2\)"):
            import_vcs_log(bad_width)
        bad_revision = (
            "revision,date,author,message,files\nxyz,2024-01-02,alice,m,f.c\n"
        )
        with pytest.raises(InterchangeError, match=r"bad revision 'xyz' \(line 2\)"):
            import_vcs_log(bad_revision)

    def test_blank_lines_are_skipped(self):
        model = import_vcs_log(VCS_CSV + "\n\n")
        commits = [e for e in model.entities.values() if e.type.name == "Commit"]
        assert len(commits) == 3


def test_registry_has_the_built_ins():
    registry = built_in_registry()
    assert set(registry) == {"std", "vcs"}
    assert all(m.generated for m in registry.values())
