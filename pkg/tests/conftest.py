"""Shared fixtures: the hand-built scenario models the tests keep reusing."""

from __future__ import annotations

import pytest

from mmkit import MetaModelBuilder, Model, commit_log_metamodel, standard_library


@pytest.fixture(scope="session")
def std():
    return standard_library()


@pytest.fixture()
def vcs_model():
    """One file touched by two commits by the same author."""
    model = Model("history", commit_log_metamodel())
    by_name = {}
    by_name["alice"] = model.create_entity("Author")
    by_name["alice"].set_property("name", "alice")
    by_name["main"] = model.create_entity("File")
    by_name["main"].set_property("name", "main.c")
    for revision in (1, 2):
        commit = model.create_entity("Commit")
        commit.set_property("revision", revision)
        commit.set_property("message", f"change {revision}")
        model.link(commit, "author", by_name["alice"])
        model.link(by_name["main"], "commits", commit)
        by_name[f"c{revision}"] = commit
    return model, by_name


@pytest.fixture()
def pkg_model(std):
    """Two packages; the only invocation crosses from P to Q."""
    model = Model("pkgs", std)
    e = {}
    for pkg_name in ("P", "Q"):
        pkg = model.create_entity("TPackage")
        pkg.set_property("name", pkg_name)
        e[pkg_name] = pkg
    e["A"] = model.create_entity("TClass")
    e["C"] = model.create_entity("TClass")
    model.link(e["P"], "packagedEntities", e["A"])
    model.link(e["Q"], "packagedEntities", e["C"])
    e["m1"] = model.create_entity("TMethod")
    e["m1"].set_property("name", "m1")
    e["m2"] = model.create_entity("TMethod")
    e["m2"].set_property("name", "m2")
    model.link(e["A"], "methods", e["m1"])
    model.link(e["C"], "methods", e["m2"])
    model.link(e["m1"], "outgoingInvocations", e["m2"])
    return model, e


@pytest.fixture(scope="session")
def sql_metamodel(std):
    """Tables own columns; procedures own statements; triggers stand alone."""
    builder = MetaModelBuilder("sql", imports=[std])
    table = builder.new_class("Table")
    column = builder.new_class("Column")
    procedure = builder.new_class("StoredProcedure")
    statement = builder.new_class("Statement")
    trigger = builder.new_class("Trigger")
    named = std.require_type("TNamedEntity")
    for owner in (table, column, procedure, trigger):
        builder.add_generalization(owner, named)
    builder.add_generalization(column, std.require_type("TAccessible"))
    for accessor in (statement, trigger):
        builder.add_generalization(accessor, std.require_type("TWithAccesses"))
    builder.add_association(
        table, column, "containmentOneToMany", name_a="columns", name_b="table"
    )
    builder.add_association(
        procedure,
        statement,
        "containmentOneToMany",
        name_a="statements",
        name_b="procedure",
    )
    return builder.generate()


@pytest.fixture()
def sql_model(sql_metamodel):
    """A column referenced from inside a procedure and from a trigger."""
    model = Model("db", sql_metamodel)
    e = {}
    e["orders"] = model.create_entity("Table")
    e["orders"].set_property("name", "orders")
    e["total"] = model.create_entity("Column")
    e["total"].set_property("name", "total")
    model.link(e["orders"], "columns", e["total"])
    e["proc"] = model.create_entity("StoredProcedure")
    e["proc"].set_property("name", "recompute")
    e["stmt"] = model.create_entity("Statement")
    model.link(e["proc"], "statements", e["stmt"])
    model.link(e["stmt"], "outgoingAccesses", e["total"])
    e["trigger"] = model.create_entity("Trigger")
    e["trigger"].set_property("name", "on_insert")
    model.link(e["trigger"], "outgoingAccesses", e["total"])
    return model, e
