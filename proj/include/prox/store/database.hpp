#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "prox/lang/ast.hpp"
#include "prox/lang/eval.hpp"
#include "prox/model/model.hpp"

namespace prox::store {

struct Table {
    model::TableSchema schema;
    std::vector<std::string> attributeNames;
    std::vector<lang::Row> rows;

    bool operator==(const Table& other) const { return schema == other.schema && rows == other.rows; }
};

class Database;

/// Immutable point-in-time copy of a Database. Cheap to take: tables are
/// shared until the live database writes to them.
class Snapshot {
public:
    Snapshot() = default;

private:
    friend class Database;
    std::map<std::string, std::shared_ptr<const Table>, std::less<>> tables_;
};

/// In-memory multiset tables keyed by name. Read-only tables accept rows
/// only through loadFixture.
class Database : public lang::RelationSource {
public:
    Database() = default;
    explicit Database(const std::vector<model::TableSchema>& schemas);

    const std::vector<std::string>* attributes(std::string_view relation) const override;
    std::span<const lang::Row> rows(std::string_view relation) const override;

    /// Throws UnknownTable.
    const Table& table(std::string_view name) const;
    std::vector<std::string> tableNames() const;

    /// Appends one row after coercing each value to its column type.
    /// Throws ReadOnlyViolation, TypeError, UnknownTable.
    void insertRow(std::string_view table, std::vector<Value> values);
    /// Removes the rows satisfying `keyFilter`, evaluated under `outer`
    /// extended with the row's attributes under their bare names. Returns
    /// the number removed.
    std::size_t deleteRows(std::string_view table, const lang::ConditionExpr& keyFilter,
                           const lang::Binding& outer = {});
    /// Bulk edit of every row: the first WHEN filter that holds (else the
    /// ELSE arm) binds the placeholders, then the SET attributes are
    /// overwritten. Filters see the pre-update contents. Returns the number
    /// of rows processed.
    std::size_t conditionalUpdate(const lang::ConditionalUpdate& stmt, const lang::Binding& outer);

    Snapshot snapshot() const;
    void restore(const Snapshot& snapshot);

    /// Order-insensitive rendering of the contents, used for state
    /// deduplication.
    std::string canonicalKey() const;

    /// Equal schemas and equal rows in the same order.
    bool operator==(const Database& other) const;
    /// Equal schemas and equal row multisets.
    bool sameContents(const Database& other) const;

private:
    friend Database loadFixture(const std::vector<model::TableSchema>& schemas, std::string_view document);

    std::map<std::string, std::shared_ptr<const Table>, std::less<>> tables_;

    Table& mutableTable(std::string_view name);
    lang::Row typedRow(const Table& table, std::vector<Value> values) const;
};

/// Binding for filters over one row of `table`: bare attribute names denote
/// the row and shadow entries of `outer`; qualified names keep whatever
/// `outer` binds (typically the precondition answer).
lang::Binding rowBinding(const Table& table, const lang::Row& row, const lang::Binding& outer);

/// Fixture document: a mapping from table names to lists of rows, each row a
/// list of values in schema order. Tables not mentioned start empty.
/// Throws ParseError, UnknownTable, TypeError.
Database loadFixture(const std::vector<model::TableSchema>& schemas, std::string_view document);
Database loadFixtureFile(const std::vector<model::TableSchema>& schemas, const std::string& path);
/// Same format as loadFixture; every table is listed.
std::string dumpFixture(const Database& db);

}  // namespace prox::store
