#include <gtest/gtest.h>

#include "dsqa/error.hpp"
#include "dsqa/sql.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace dsqa;

namespace {

std::vector<std::string> sorted_lines(const ResultFrame& f) {
  std::vector<std::string> out;
  for (const auto& row : f.rows) {
    std::string line;
    for (const auto& v : row) line += render_value(v) + "\x1f";
    out.push_back(line);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ErrorCode expected_code(const std::string& family) {
  if (family == "read-only") return ErrorCode::ReadOnly;
  if (family == "multiple") return ErrorCode::MultipleStatements;
  if (family == "unsupported") return ErrorCode::Unsupported;
  return ErrorCode::UnknownIdentifier;
}

}  // namespace

TEST(SqlFuzz, GeneratedStatementsValidateAndExecute) {
  Store store;
  dsqa::test_support::load_bundled(store);
  oracle::SqlGrammar grammar(7);
  for (int i = 0; i < 1000; ++i) {
    auto text = grammar.statement();
    sql::ValidatedSql v;
    try {
      v = sql::validate_sql(text, store.catalog());
    } catch (const Error& e) {
      ADD_FAILURE() << text << ": " << e.what();
      continue;
    }
    EXPECT_TRUE(v.primitives.count(sql::Primitive::Retrieve)) << text;
    // Normalizing twice changes nothing.
    EXPECT_EQ(sql::validate_sql(v.text, store.catalog()).text, v.text) << text;
    if (text.find("LIMIT") == std::string::npos && text.find("limit") == std::string::npos) {
      EXPECT_EQ(sorted_lines(store.query(v.text)), sorted_lines(store.query(text))) << text;
    } else {
      EXPECT_NO_THROW(store.query(v.text)) << v.text;
    }
  }
}

TEST(SqlFuzz, MutatedStatementsAreRejectedWithoutSideEffects) {
  Store store;
  dsqa::test_support::load_bundled(store);
  auto dump = [&] {
    std::string all;
    for (const char* t : {"teams", "players", "fixtures"}) all += canonical_bytes(store.read_table(t));
    return all;
  };
  auto before = dump();
  auto id = store.content_id();
  auto size = store.storage_size();
  oracle::SqlGrammar grammar(11);
  for (int i = 0; i < 100; ++i) {
    auto [text, family] = grammar.rejected();
    try {
      sql::validate_sql(text, store.catalog());
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), expected_code(family)) << text << ": " << e.what();
    }
  }
  EXPECT_EQ(dump(), before);
  EXPECT_EQ(store.content_id(), id);
  EXPECT_EQ(store.storage_size(), size);
}
