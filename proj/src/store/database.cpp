#include "prox/store/database.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "prox/error.hpp"
#include "prox/lang/printer.hpp"

namespace prox::store {

Database::Database(const std::vector<model::TableSchema>& schemas) {
    for (const auto& schema : schemas) {
        auto table = std::make_shared<Table>();
        table->schema = schema;
        table->attributeNames = schema.attributeNames();
        tables_.emplace(schema.name, std::move(table));
    }
}

const std::vector<std::string>* Database::attributes(std::string_view relation) const {
    auto it = tables_.find(relation);
    return it == tables_.end() ? nullptr : &it->second->attributeNames;
}

std::span<const lang::Row> Database::rows(std::string_view relation) const { return table(relation).rows; }

const Table& Database::table(std::string_view name) const {
    auto it = tables_.find(name);
    if (it == tables_.end()) {
        throw UnknownTable(std::string(name));
    }
    return *it->second;
}

std::vector<std::string> Database::tableNames() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : tables_) {
        names.push_back(name);
    }
    return names;
}

Table& Database::mutableTable(std::string_view name) {
    auto it = tables_.find(name);
    if (it == tables_.end()) {
        throw UnknownTable(std::string(name));
    }
    if (it->second->schema.readOnly) {
        throw ReadOnlyViolation(it->first);
    }
    // Copy on write: snapshots keep pointing at the old version.
    auto copy = std::make_shared<Table>(*it->second);
    Table& ref = *copy;
    it->second = std::move(copy);
    return ref;
}

lang::Row Database::typedRow(const Table& table, std::vector<Value> values) const {
    const auto& attrs = table.schema.attributes;
    if (values.size() != attrs.size()) {
        throw TypeError("table '" + table.schema.name + "' has " + std::to_string(attrs.size()) +
                        " attributes, got " + std::to_string(values.size()) + " values");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        PrimitiveType type = attrs[i].type.primitiveType();
        auto coerced = coerce(values[i], type);
        if (!coerced) {
            throw TypeError(table.schema.name + "." + attrs[i].name + " expects " + std::string(toString(type)) +
                            ", got " + std::string(toString(typeOf(values[i]))) + " " + toLiteral(values[i]));
        }
        values[i] = std::move(*coerced);
    }
    return values;
}

void Database::insertRow(std::string_view tableName, std::vector<Value> values) {
    const Table& current = table(tableName);
    if (current.schema.readOnly) {
        throw ReadOnlyViolation(current.schema.name);
    }
    lang::Row row = typedRow(current, std::move(values));
    mutableTable(tableName).rows.push_back(std::move(row));
}

lang::Binding rowBinding(const Table& table, const lang::Row& row, const lang::Binding& outer) {
    lang::Binding env = outer;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const std::string& attr = table.attributeNames[i];
        env.insert_or_assign(attr, row[i]);
    }
    return env;
}

std::size_t Database::deleteRows(std::string_view tableName, const lang::ConditionExpr& keyFilter,
                                 const lang::Binding& outer) {
    const Table& current = table(tableName);
    if (current.schema.readOnly) {
        throw ReadOnlyViolation(current.schema.name);
    }
    std::vector<lang::Row> kept;
    for (const auto& row : current.rows) {
        if (!lang::evalCondition(keyFilter, rowBinding(current, row, outer))) {
            kept.push_back(row);
        }
    }
    std::size_t removed = current.rows.size() - kept.size();
    if (removed > 0) {
        mutableTable(tableName).rows = std::move(kept);
    }
    return removed;
}

std::size_t Database::conditionalUpdate(const lang::ConditionalUpdate& stmt, const lang::Binding& outer) {
    const Table& current = table(stmt.table);
    if (current.schema.readOnly) {
        throw ReadOnlyViolation(current.schema.name);
    }
    std::vector<std::size_t> columns;
    for (const auto& item : stmt.set) {
        auto it = std::find(current.attributeNames.begin(), current.attributeNames.end(), item.attribute);
        if (it == current.attributeNames.end()) {
            throw EffectError("table '" + stmt.table + "' has no attribute '" + item.attribute + "'");
        }
        columns.push_back(static_cast<std::size_t>(it - current.attributeNames.begin()));
    }

    std::vector<lang::Row> updated;
    updated.reserve(current.rows.size());
    for (const auto& row : current.rows) {
        lang::Binding env = rowBinding(current, row, outer);
        const std::vector<lang::PlaceholderAssignment>* arm = &stmt.otherwise;
        for (const auto& branch : stmt.branches) {
            if (lang::evalFilter(branch.when, env, this)) {
                arm = &branch.then;
                break;
            }
        }
        std::map<std::string, Value> placeholders;
        for (const auto& assignment : *arm) {
            placeholders.insert_or_assign(assignment.placeholder, lang::evalTerm(assignment.value, env));
        }
        lang::Row next = row;
        for (std::size_t i = 0; i < stmt.set.size(); ++i) {
            auto it = placeholders.find(stmt.set[i].placeholder);
            if (it == placeholders.end()) {
                throw UnboundPlaceholder(stmt.set[i].placeholder);
            }
            PrimitiveType type = current.schema.attributes[columns[i]].type.primitiveType();
            auto coerced = coerce(it->second, type);
            if (!coerced) {
                throw TypeError(stmt.table + "." + stmt.set[i].attribute + " expects " +
                                std::string(toString(type)) + ", got " + toLiteral(it->second));
            }
            next[columns[i]] = std::move(*coerced);
        }
        updated.push_back(std::move(next));
    }
    std::size_t count = updated.size();
    if (updated != current.rows) {
        mutableTable(stmt.table).rows = std::move(updated);
    }
    return count;
}

Snapshot Database::snapshot() const {
    Snapshot s;
    s.tables_ = tables_;
    return s;
}

void Database::restore(const Snapshot& snapshot) { tables_ = snapshot.tables_; }

namespace {

std::vector<std::string> renderedRows(const Table& table) {
    std::vector<std::string> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        std::string line;
        for (const auto& v : row) {
            line += toLiteral(v);
            line += '\x1f';
        }
        out.push_back(std::move(line));
    }
    return out;
}

}  // namespace

std::string Database::canonicalKey() const {
    std::string key;
    for (const auto& [name, table] : tables_) {
        auto rendered = renderedRows(*table);
        std::sort(rendered.begin(), rendered.end());
        key += name;
        key += '\x1d';
        for (const auto& r : rendered) {
            key += r;
            key += '\x1e';
        }
    }
    return key;
}

bool Database::operator==(const Database& other) const {
    if (tables_.size() != other.tables_.size()) {
        return false;
    }
    for (const auto& [name, table] : tables_) {
        auto it = other.tables_.find(name);
        if (it == other.tables_.end() || !(*table == *it->second)) {
            return false;
        }
    }
    return true;
}

bool Database::sameContents(const Database& other) const {
    if (tableNames() != other.tableNames()) {
        return false;
    }
    for (const auto& [name, table] : tables_) {
        if (!(table->schema == other.table(name).schema)) {
            return false;
        }
    }
    return canonicalKey() == other.canonicalKey();
}

Database loadFixture(const std::vector<model::TableSchema>& schemas, std::string_view document) {
    Database db(schemas);
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(document));
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    if (!doc || doc.IsNull()) {
        return db;
    }
    if (!doc.IsMap()) {
        throw ParseError(doc.Mark().line + 1, doc.Mark().column + 1, "fixture must map table names to rows");
    }
    for (const auto& entry : doc) {
        std::string name = entry.first.Scalar();
        auto it = db.tables_.find(name);
        if (it == db.tables_.end()) {
            throw UnknownTable(name);
        }
        auto table = std::make_shared<Table>(*it->second);
        const YAML::Node& rows = entry.second;
        if (rows.IsNull()) {
            continue;
        }
        if (!rows.IsSequence()) {
            throw ParseError(rows.Mark().line + 1, rows.Mark().column + 1, "rows of '" + name + "' must be a list");
        }
        for (const auto& row : rows) {
            auto where = " (line " + std::to_string(row.Mark().line + 1) + ")";
            if (!row.IsSequence()) {
                throw ParseError(row.Mark().line + 1, row.Mark().column + 1, "a row must be a list of values");
            }
            if (row.size() != table->schema.attributes.size()) {
                throw TypeError("row of '" + name + "' has " + std::to_string(row.size()) + " values, expected " +
                                std::to_string(table->schema.attributes.size()) + where);
            }
            lang::Row values;
            for (std::size_t i = 0; i < row.size(); ++i) {
                const auto& attr = table->schema.attributes[i];
                PrimitiveType type = attr.type.primitiveType();
                if (!row[i].IsScalar()) {
                    throw TypeError(name + "." + attr.name + " expects a " + std::string(toString(type)) + where);
                }
                auto value = parseScalar(row[i].Scalar(), type);
                if (!value) {
                    throw TypeError(name + "." + attr.name + " expects " + std::string(toString(type)) + ", got '" +
                                    row[i].Scalar() + "'" + where);
                }
                values.push_back(std::move(*value));
            }
            table->rows.push_back(std::move(values));
        }
        it->second = std::move(table);
    }
    return db;
}

Database loadFixtureFile(const std::vector<model::TableSchema>& schemas, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open fixture file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return loadFixture(schemas, buffer.str());
}

std::string dumpFixture(const Database& db) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    for (const auto& name : db.tableNames()) {
        const Table& table = db.table(name);
        out << YAML::Key << name << YAML::Value << YAML::BeginSeq;
        for (const auto& row : table.rows) {
            out << YAML::Flow << YAML::BeginSeq;
            for (const auto& v : row) {
                if (typeOf(v) == PrimitiveType::String) {
                    out << YAML::DoubleQuoted << std::get<std::string>(v);
                } else {
                    out << toPlain(v);
                }
            }
            out << YAML::EndSeq;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace prox::store
