#include <gtest/gtest.h>

#include <fstream>
#include <future>
#include <thread>

#include "dsqa/error.hpp"
#include "dsqa/schema.hpp"
#include "dsqa/store.hpp"
#include "test_support.hpp"

using namespace dsqa;
using dsqa::test_support::TempDir;

namespace {

Row team(std::int64_t id, const std::string& name, std::int64_t points) {
  return {id, name, name.substr(0, 3), std::int64_t{1}, std::int64_t{10}, std::int64_t{5}, std::int64_t{2},
          std::int64_t{3}, points, std::int64_t{3}};
}

Row history(std::int64_t pid, const std::string& season, std::int64_t pts) {
  return {pid, season, pts, std::int64_t{900}, std::int64_t{1}, std::int64_t{2},
          std::int64_t{0}, std::int64_t{0}, std::int64_t{0}, std::int64_t{0}};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Io;
}

}  // namespace

TEST(Schema, DefaultCatalogPartitionsTiers) {
  auto cat = default_catalog();
  EXPECT_NO_THROW(validate_catalog(cat));
  EXPECT_EQ(cat.tables_in(Tier::Persistent).size(), 3u);
  EXPECT_EQ(cat.tables_in(Tier::Ephemeral).size(), 3u);
  EXPECT_TRUE(is_ephemeral_table("player_history"));
  EXPECT_FALSE(is_ephemeral_table("players"));
}

TEST(Schema, RejectsDuplicatesAndWrongTier) {
  auto cat = default_catalog();
  cat.tables[0].columns.push_back(cat.tables[0].columns[0]);
  EXPECT_EQ(code_of([&] { validate_catalog(cat); }), ErrorCode::Schema);

  auto moved = default_catalog();
  moved.tables[0].tier = Tier::Ephemeral;
  EXPECT_EQ(code_of([&] { validate_catalog(moved); }), ErrorCode::Tier);

  auto no_pk = default_catalog();
  no_pk.tables[1].primary_key = {"nope"};
  EXPECT_EQ(code_of([&] { validate_catalog(no_pk); }), ErrorCode::Schema);
}

TEST(Schema, JsonRoundTripAndDeterministicText) {
  auto cat = default_catalog();
  auto back = catalog_from_json(catalog_to_json(cat));
  EXPECT_EQ(catalog_to_json(back), catalog_to_json(cat));
  EXPECT_EQ(render_schema_text(back), render_schema_text(cat));
  EXPECT_NE(render_schema_text(cat).find("player_history"), std::string::npos);
  EXPECT_THROW(catalog_from_json(R"({"version":1,"tables":[{"name":"t","tier":"persistent","primary_key":["a"],
      "columns":[{"name":"a","type":"blob"}]}]})"),
               Error);
}

TEST(Store, UpsertIsLastWriteWins) {
  Store store;
  store.apply_schema(default_catalog());
  EXPECT_EQ(store.upsert_rows("teams", {team(1, "Arsenal", 10), team(1, "Arsenal", 12), team(2, "Chelsea", 9)}), 2u);
  store.upsert_rows("teams", {team(2, "Chelsea", 30)});
  auto f = store.query("SELECT team_id, points FROM teams ORDER BY team_id");
  ASSERT_EQ(f.row_count(), 2u);
  EXPECT_EQ(std::get<std::int64_t>(f.rows[0][1]), 12);
  EXPECT_EQ(std::get<std::int64_t>(f.rows[1][1]), 30);
}

TEST(Store, RejectsBadRowsAndTierViolations) {
  Store store;
  store.apply_schema(default_catalog());
  auto bad = team(1, "A", 1);
  bad[8] = std::string("many");
  EXPECT_EQ(code_of([&] { store.upsert_rows("teams", {bad}); }), ErrorCode::Row);
  EXPECT_EQ(code_of([&] { store.upsert_rows("player_history", {history(1, "2020/21", 3)}); }), ErrorCode::Tier);
  auto s = store.open_session();
  EXPECT_EQ(code_of([&] { store.materialize_ephemeral("teams", 1, {team(1, "A", 1)}, s); }), ErrorCode::Tier);
}

TEST(Store, EphemeralRowsAreSessionScoped) {
  Store store;
  store.apply_schema(default_catalog());
  auto a = store.open_session();
  auto b = store.open_session();
  store.materialize_ephemeral("player_history", 7, {history(7, "2021/22", 100), history(7, "2020/21", 80)}, a);
  EXPECT_TRUE(store.is_materialized(a, "player_history"));
  EXPECT_FALSE(store.is_materialized(b, "player_history"));
  auto rows = store.ephemeral_rows(a, "player_history");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(std::get<std::string>(rows[0][1]), "2020/21");

  auto f = store.query("SELECT SUM(total_points) FROM player_history", &a);
  EXPECT_EQ(std::get<std::int64_t>(f.rows[0][0]), 180);
  EXPECT_EQ(code_of([&] { store.query("SELECT * FROM player_history", &b); }), ErrorCode::NotMaterialized);

  auto before = store.storage_size();
  a.close();
  EXPECT_FALSE(a.is_open());
  EXPECT_EQ(store.open_session_count(), 1u);
  EXPECT_EQ(store.storage_size(), before);
  EXPECT_THROW(store.ephemeral_rows(a, "player_history"), Error);
}

TEST(Store, RematerializingReplacesThePlayerSlice) {
  Store store;
  store.apply_schema(default_catalog());
  auto s = store.open_session();
  store.materialize_ephemeral("player_history", 7, {history(7, "2021/22", 100)}, s);
  store.materialize_ephemeral("player_history", 8, {history(8, "2021/22", 5)}, s);
  store.materialize_ephemeral("player_history", 7, {history(7, "2019/20", 1)}, s);
  auto f = store.query("SELECT player_id, season_name FROM player_history ORDER BY player_id", &s);
  ASSERT_EQ(f.row_count(), 2u);
  EXPECT_EQ(std::get<std::string>(f.rows[0][1]), "2019/20");
}

TEST(Store, QueriesCannotWrite) {
  Store store;
  store.apply_schema(default_catalog());
  store.upsert_rows("teams", {team(1, "A", 1)});
  EXPECT_THROW(store.query("DELETE FROM teams"), Error);
  EXPECT_EQ(store.read_table("teams").row_count(), 1u);
}

TEST(Store, SnapshotRoundTripPreservesContentId) {
  Store store;
  dsqa::test_support::load_bundled(store);
  auto snap = store.take_snapshot();
  EXPECT_EQ(snap.snapshot_id, store.content_id());
  EXPECT_EQ(snap.snapshot_id, compute_snapshot_id(snap.tables));

  TempDir dir;
  save_snapshot(snap, dir.file("snap"));
  auto loaded = load_snapshot(dir.file("snap"));
  EXPECT_EQ(loaded.snapshot_id, snap.snapshot_id);

  Store other;
  other.apply_schema(default_catalog());
  other.restore(loaded);
  EXPECT_EQ(other.content_id(), snap.snapshot_id);
  EXPECT_TRUE(same_content(other.read_table("players"), store.read_table("players")));

  other.upsert_rows("teams", {team(1, "Renamed", 0)});
  EXPECT_NE(other.content_id(), snap.snapshot_id);
}

TEST(Store, TamperedSnapshotIsRejected) {
  Store store;
  store.apply_schema(default_catalog());
  store.upsert_rows("teams", {team(1, "A", 1)});
  TempDir dir;
  save_snapshot(store.take_snapshot(), dir.str());
  {
    std::ofstream out(dir.file("teams.tsv"), std::ios::app);
    out << "junk\n";
  }
  EXPECT_THROW(load_snapshot(dir.str()), Error);
}

TEST(Store, SnapshotIsBusyWhileIngestHoldsTheWriter) {
  Store store;
  store.apply_schema(default_catalog());
  std::promise<void> locked, release;
  std::thread writer([&] {
    auto lock = store.lock_writer();
    locked.set_value();
    release.get_future().wait();
  });
  locked.get_future().wait();
  EXPECT_EQ(code_of([&] { store.take_snapshot(); }), ErrorCode::Busy);
  release.set_value();
  writer.join();
  EXPECT_NO_THROW(store.take_snapshot());
}

TEST(Store, BudgetCountsPersistentTierOnly) {
  Store store;
  dsqa::test_support::load_bundled(store);
  auto size = store.storage_size();
  EXPECT_GT(size, 0u);
  store.set_storage_budget(size - 1);
  EXPECT_TRUE(store.over_budget());
  store.set_storage_budget(size);
  EXPECT_FALSE(store.over_budget());
}
