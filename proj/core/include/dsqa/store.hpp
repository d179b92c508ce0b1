#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/frame.hpp"
#include "dsqa/schema.hpp"

struct sqlite3;

namespace dsqa {

inline constexpr std::uint64_t kDefaultStorageBudget = 5ull * 1024 * 1024 * 1024;

/// Immutable, content-addressed copy of the persistent tier. `tables` holds
/// the canonical bytes of each persistent table (rows sorted by primary key)
/// in schema order.
struct Snapshot {
  std::string snapshot_id;
  std::string created_at;
  int schema_version = 1;
  std::vector<std::pair<std::string, std::string>> tables;
};

/// Hash of canonicalized table contents; the snapshot id.
std::string compute_snapshot_id(const std::vector<std::pair<std::string, std::string>>& tables);

/// Archive layout: `<dir>/manifest.json` plus one `<table>.tsv` per table.
void save_snapshot(const Snapshot& snapshot, const std::string& dir);
/// Loads an archive and verifies its contents hash to the manifest id.
Snapshot load_snapshot(const std::string& dir);

class Store;

/// One question's lifecycle. Move-only; closing (or destroying) the handle
/// discards every ephemeral table materialized under it.
class Session {
 public:
  Session(Session&& other) noexcept;
  Session& operator=(Session&& other) noexcept;
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ~Session();

  std::uint64_t id() const { return id_; }
  bool is_open() const { return open_; }
  void close();

  /// Resolved player ids used to parameterize just-in-time fetches.
  std::vector<std::int64_t> player_ids;

 private:
  friend class Store;
  Session(Store* store, std::uint64_t id) : store_(store), id_(id), open_(true) {}

  Store* store_ = nullptr;
  std::uint64_t id_ = 0;
  bool open_ = false;
};

/// Relational store: a persistent tier backed by an embedded SQLite database
/// and an ephemeral tier held per session in memory. Single writer (ingest),
/// many readers; statements on the shared connection are serialized.
class Store {
 public:
  explicit Store(const std::string& path = ":memory:", std::uint64_t storage_budget = kDefaultStorageBudget);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  void apply_schema(const SchemaCatalog& catalog);
  const SchemaCatalog& catalog() const { return catalog_; }

  /// Last-write-wins upsert into a persistent table. Returns the number of
  /// distinct primary keys in the batch.
  std::size_t upsert_rows(std::string_view table, std::vector<Row> rows);

  /// Makes `rows` (one player's slice of an ephemeral table) visible to
  /// `session` only, replacing any earlier slice for the same player.
  void materialize_ephemeral(std::string_view table, std::int64_t player_id, std::vector<Row> rows,
                             Session& session);
  bool is_materialized(const Session& session, std::string_view table) const;
  std::vector<std::string> materialized_tables(const Session& session) const;
  /// Rows of an ephemeral table in primary-key order; throws NotMaterialized.
  std::vector<Row> ephemeral_rows(const Session& session, std::string_view table) const;
  std::size_t open_session_count() const;

  Session open_session();

  /// Runs a read statement. Session-local ephemeral tables are visible under
  /// their catalog names for the duration of the statement. A reference to an
  /// ephemeral table that is not materialized raises Error(NotMaterialized)
  /// with the table name as detail.
  ResultFrame query(std::string_view sql, const Session* session = nullptr,
                    std::chrono::milliseconds timeout = std::chrono::seconds(10));

  /// Full persistent table in primary-key order.
  ResultFrame read_table(std::string_view table);

  Snapshot take_snapshot();
  void restore(const Snapshot& snapshot);
  /// Snapshot id of the current contents (cached until the next write).
  std::string content_id();

  /// Bytes used by the persistent tier only.
  std::uint64_t storage_size() const;
  std::uint64_t storage_budget() const { return storage_budget_; }
  void set_storage_budget(std::uint64_t bytes) { storage_budget_ = bytes; }
  bool over_budget() const { return storage_size() > storage_budget_; }

  /// Held by ingest for the duration of a sync; take_snapshot fails with
  /// Error(Busy) while another thread holds it.
  std::unique_lock<std::recursive_mutex> lock_writer() { return std::unique_lock(writer_mutex_); }

 private:
  friend class Session;
  struct SessionData {
    // table -> player_id -> rows
    std::map<std::string, std::map<std::int64_t, std::vector<Row>>, std::less<>> tables;
  };

  void close_session(std::uint64_t id);
  void exec(const std::string& sql);
  void check_rows(const TableDef& def, const std::vector<Row>& rows) const;
  std::vector<std::pair<std::string, std::string>> canonical_tables();
  void invalidate_content_id();
  const TableDef& table_def(std::string_view name) const;

  sqlite3* db_ = nullptr;
  SchemaCatalog catalog_;
  bool schema_applied_ = false;
  std::uint64_t storage_budget_;
  mutable std::mutex db_mutex_;
  std::recursive_mutex writer_mutex_;
  mutable std::mutex sessions_mutex_;
  std::map<std::uint64_t, SessionData> sessions_;
  std::uint64_t next_session_id_ = 1;
  std::mutex content_mutex_;
  std::optional<std::string> content_id_;
};

std::string utc_now_iso8601();

}  // namespace dsqa
