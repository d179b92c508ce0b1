#include "dsqa/store.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <set>

#include "json.hpp"

#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string sql_type(ColumnType t) {
  switch (t) {
    case ColumnType::Integer: return "INTEGER";
    case ColumnType::Real: return "REAL";
    case ColumnType::Text: return "TEXT";
    case ColumnType::Boolean: return "BOOLEAN";
  }
  return "TEXT";
}

std::optional<ColumnType> decl_to_type(const char* decl) {
  if (!decl) return std::nullopt;
  auto d = ascii_upper(decl);
  if (d == "INTEGER" || d == "INT") return ColumnType::Integer;
  if (d == "REAL" || d == "DOUBLE" || d == "FLOAT") return ColumnType::Real;
  if (d == "TEXT" || d.rfind("VARCHAR", 0) == 0) return ColumnType::Text;
  if (d == "BOOLEAN" || d == "BOOL") return ColumnType::Boolean;
  return std::nullopt;
}

std::string create_table_sql(const TableDef& t, bool temp) {
  std::string sql = temp ? "CREATE TEMP TABLE " : "CREATE TABLE IF NOT EXISTS ";
  sql += t.name + " (";
  for (const auto& c : t.columns) {
    sql += c.name + " " + sql_type(c.type);
    if (!c.nullable) sql += " NOT NULL";
    sql += ", ";
  }
  sql += "PRIMARY KEY (";
  for (std::size_t i = 0; i < t.primary_key.size(); ++i) sql += (i ? ", " : "") + t.primary_key[i];
  sql += "))";
  // Single INTEGER keys alias the rowid; composite keys get a clustered
  // index. Either way a full scan returns rows in primary-key order.
  if (t.primary_key.size() > 1) sql += " WITHOUT ROWID";
  return sql;
}

std::string insert_sql(const TableDef& t, bool replace, const std::string& schema = "") {
  std::string sql = replace ? "INSERT OR REPLACE INTO " : "INSERT INTO ";
  sql += (schema.empty() ? "" : schema + ".") + t.name + " (";
  std::string params;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    sql += (i ? ", " : "") + t.columns[i].name;
    params += i ? ", ?" : "?";
  }
  return sql + ") VALUES (" + params + ")";
}

std::string order_by_pk_sql(const TableDef& t) {
  std::string sql = "SELECT ";
  for (std::size_t i = 0; i < t.columns.size(); ++i) sql += (i ? ", " : "") + t.columns[i].name;
  sql += " FROM " + t.name + " ORDER BY ";
  for (std::size_t i = 0; i < t.primary_key.size(); ++i) sql += (i ? ", " : "") + t.primary_key[i];
  return sql;
}

class Statement {
 public:
  Statement(sqlite3* db, const std::string& sql) : db_(db) {
    const char* tail = nullptr;
    int rc = sqlite3_prepare_v2(db, sql.c_str(), static_cast<int>(sql.size()), &stmt_, &tail);
    if (rc != SQLITE_OK) {
      std::string msg = sqlite3_errmsg(db);
      throw_prepare_error(msg, sql);
    }
    if (tail && !trim(std::string_view(tail)).empty() && trim(std::string_view(tail)) != ";")
      throw Error(ErrorCode::MultipleStatements, "multiple statements are not allowed", sql);
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  sqlite3_stmt* get() const { return stmt_; }

  void bind(int idx, const Value& v) {
    int rc = SQLITE_OK;
    switch (v.index()) {
      case 0: rc = sqlite3_bind_null(stmt_, idx); break;
      case 1: rc = sqlite3_bind_int64(stmt_, idx, std::get<std::int64_t>(v)); break;
      case 2: rc = sqlite3_bind_double(stmt_, idx, std::get<double>(v)); break;
      case 3: {
        const auto& s = std::get<std::string>(v);
        rc = sqlite3_bind_text(stmt_, idx, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
        break;
      }
      case 4: rc = sqlite3_bind_int64(stmt_, idx, std::get<bool>(v) ? 1 : 0); break;
    }
    if (rc != SQLITE_OK) throw Error(ErrorCode::Storage, sqlite3_errmsg(db_));
  }

  void reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }

  static void throw_prepare_error(const std::string& msg, const std::string& sql) {
    static constexpr std::string_view kNoTable = "no such table: ";
    if (msg.rfind(kNoTable, 0) == 0) {
      std::string name = msg.substr(kNoTable.size());
      if (auto dot = name.find('.'); dot != std::string::npos) name = name.substr(dot + 1);
      if (is_ephemeral_table(name))
        throw Error(ErrorCode::NotMaterialized, "table not materialized: " + name, name);
    }
    throw Error(ErrorCode::Execution, "engine error: " + msg, sql);
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

Value read_column(sqlite3_stmt* stmt, int c) {
  switch (sqlite3_column_type(stmt, c)) {
    case SQLITE_INTEGER: return static_cast<std::int64_t>(sqlite3_column_int64(stmt, c));
    case SQLITE_FLOAT: return sqlite3_column_double(stmt, c);
    case SQLITE_NULL: return Null{};
    default: {
      const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(stmt, c));
      int len = sqlite3_column_bytes(stmt, c);
      return std::string(text ? text : "", static_cast<std::size_t>(len));
    }
  }
}

struct Deadline {
  Clock::time_point at;
  bool expired = false;
};

int progress_callback(void* ctx) {
  auto* d = static_cast<Deadline*>(ctx);
  if (Clock::now() > d->at) {
    d->expired = true;
    return 1;
  }
  return 0;
}

}  // namespace

std::string utc_now_iso8601() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------- Session

Session::Session(Session&& other) noexcept
    : player_ids(std::move(other.player_ids)), store_(other.store_), id_(other.id_), open_(other.open_) {
  other.open_ = false;
  other.store_ = nullptr;
}

Session& Session::operator=(Session&& other) noexcept {
  if (this != &other) {
    close();
    player_ids = std::move(other.player_ids);
    store_ = other.store_;
    id_ = other.id_;
    open_ = other.open_;
    other.open_ = false;
    other.store_ = nullptr;
  }
  return *this;
}

Session::~Session() { close(); }

void Session::close() {
  if (open_ && store_) store_->close_session(id_);
  open_ = false;
}

// ---------------------------------------------------------------- Store

Store::Store(const std::string& path, std::uint64_t storage_budget) : storage_budget_(storage_budget) {
  int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error(ErrorCode::Storage, "cannot open store at " + path + ": " + msg);
  }
  exec("PRAGMA temp_store = MEMORY");
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(ErrorCode::Storage, "engine error: " + msg, sql);
  }
}

const TableDef& Store::table_def(std::string_view name) const {
  const auto* t = catalog_.find_table(name);
  if (!t) throw Error(ErrorCode::NotFound, "unknown table: " + std::string(name));
  return *t;
}

void Store::apply_schema(const SchemaCatalog& catalog) {
  validate_catalog(catalog);
  std::lock_guard writer(writer_mutex_);
  std::lock_guard lock(db_mutex_);
  exec("BEGIN");
  try {
    for (const auto& t : catalog.tables)
      if (t.tier == Tier::Persistent) exec(create_table_sql(t, false));
    exec("COMMIT");
  } catch (...) {
    exec("ROLLBACK");
    throw;
  }
  catalog_ = catalog;
  schema_applied_ = true;
  invalidate_content_id();
}

void Store::check_rows(const TableDef& def, const std::vector<Row>& rows) const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != def.columns.size())
      throw Error(ErrorCode::Row, "row " + std::to_string(r) + ": expected " + std::to_string(def.columns.size()) +
                                      " values, got " + std::to_string(row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& col = def.columns[c];
      if (is_null(row[c])) {
        if (!col.nullable)
          throw Error(ErrorCode::Row, "row " + std::to_string(r) + ", column " + col.name + ": null in non-nullable column");
        continue;
      }
      if (!value_fits(row[c], col.type))
        throw Error(ErrorCode::Row, "row " + std::to_string(r) + ", column " + col.name + ": expected " +
                                        std::string(to_string(col.type)) + ", got " +
                                        std::string(value_type_name(row[c])));
    }
  }
}

std::size_t Store::upsert_rows(std::string_view table, std::vector<Row> rows) {
  const auto& def = table_def(table);
  if (def.tier != Tier::Persistent)
    throw Error(ErrorCode::Tier, "tier violation: " + def.name + " is ephemeral and has no persistent backing");
  check_rows(def, rows);

  // Last record per primary key wins within the batch.
  auto pk = def.primary_key_indices();
  std::map<std::string, std::size_t> last;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string key;
    for (auto k : pk) key += render_value(coerce_value(rows[r][k], def.columns[k].type)) + '\x1f';
    last[key] = r;
  }
  std::vector<std::size_t> keep;
  for (const auto& [_, idx] : last) keep.push_back(idx);
  std::sort(keep.begin(), keep.end());

  std::lock_guard writer(writer_mutex_);
  std::lock_guard lock(db_mutex_);
  exec("BEGIN");
  try {
    Statement stmt(db_, insert_sql(def, true));
    for (auto idx : keep) {
      const auto& row = rows[idx];
      for (std::size_t c = 0; c < row.size(); ++c)
        stmt.bind(static_cast<int>(c + 1), coerce_value(row[c], def.columns[c].type));
      if (sqlite3_step(stmt.get()) != SQLITE_DONE)
        throw Error(ErrorCode::Storage, std::string("upsert failed: ") + sqlite3_errmsg(db_));
      stmt.reset();
    }
    exec("COMMIT");
  } catch (...) {
    exec("ROLLBACK");
    throw;
  }
  invalidate_content_id();
  return keep.size();
}

Session Store::open_session() {
  std::lock_guard lock(sessions_mutex_);
  auto id = next_session_id_++;
  sessions_.emplace(id, SessionData{});
  return Session(this, id);
}

void Store::close_session(std::uint64_t id) {
  std::lock_guard lock(sessions_mutex_);
  sessions_.erase(id);
}

std::size_t Store::open_session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

void Store::materialize_ephemeral(std::string_view table, std::int64_t player_id, std::vector<Row> rows,
                                  Session& session) {
  const auto& def = table_def(table);
  if (def.tier != Tier::Ephemeral)
    throw Error(ErrorCode::Tier, "tier violation: " + def.name + " is persistent");
  if (!session.is_open() || session.store_ != this) throw Error(ErrorCode::Session, "session is closed");
  check_rows(def, rows);
  auto pid_col = *def.column_index("player_id");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) rows[r][c] = coerce_value(rows[r][c], def.columns[c].type);
    const auto* pid = std::get_if<std::int64_t>(&rows[r][pid_col]);
    if (!pid || *pid != player_id)
      throw Error(ErrorCode::Row, "row " + std::to_string(r) + ", column player_id: does not match player " +
                                      std::to_string(player_id));
  }
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(session.id());
  if (it == sessions_.end()) throw Error(ErrorCode::Session, "session is closed");
  it->second.tables[def.name][player_id] = std::move(rows);
}

bool Store::is_materialized(const Session& session, std::string_view table) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(session.id());
  if (!session.is_open() || it == sessions_.end()) return false;
  return it->second.tables.find(table) != it->second.tables.end();
}

std::vector<std::string> Store::materialized_tables(const Session& session) const {
  std::lock_guard lock(sessions_mutex_);
  std::vector<std::string> out;
  auto it = sessions_.find(session.id());
  if (!session.is_open() || it == sessions_.end()) return out;
  for (const auto& [name, _] : it->second.tables) out.push_back(name);
  return out;
}

std::vector<Row> Store::ephemeral_rows(const Session& session, std::string_view table) const {
  const auto& def = table_def(table);
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(session.id());
  if (!session.is_open() || it == sessions_.end())
    throw Error(ErrorCode::NotMaterialized, "table not materialized: " + def.name + " (session closed)", def.name);
  auto tit = it->second.tables.find(table);
  if (tit == it->second.tables.end())
    throw Error(ErrorCode::NotMaterialized, "table not materialized: " + def.name, def.name);
  std::vector<Row> out;
  for (const auto& [_, rows] : tit->second) out.insert(out.end(), rows.begin(), rows.end());
  auto pk = def.primary_key_indices();
  std::stable_sort(out.begin(), out.end(), [&](const Row& a, const Row& b) {
    for (auto k : pk) {
      if (int c = compare_values(a[k], b[k]); c != 0) return c < 0;
    }
    return false;
  });
  return out;
}

ResultFrame Store::query(std::string_view sql, const Session* session, std::chrono::milliseconds timeout) {
  if (!schema_applied_) throw Error(ErrorCode::Schema, "schema not applied");
  if (session && !session->is_open()) throw Error(ErrorCode::Session, "session is closed");

  std::map<std::string, std::vector<Row>> ephemeral;
  if (session) {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(session->id());
    if (it == sessions_.end()) throw Error(ErrorCode::Session, "session is closed");
    for (const auto& [name, by_player] : it->second.tables) {
      auto& rows = ephemeral[name];
      for (const auto& [_, slice] : by_player) rows.insert(rows.end(), slice.begin(), slice.end());
    }
  }

  std::lock_guard lock(db_mutex_);
  std::vector<std::string> created;
  auto drop_temps = [&] {
    for (const auto& name : created) {
      char* err = nullptr;
      sqlite3_exec(db_, ("DROP TABLE IF EXISTS temp." + name).c_str(), nullptr, nullptr, &err);
      sqlite3_free(err);
    }
  };
  try {
    for (const auto& [name, rows] : ephemeral) {
      const auto& def = table_def(name);
      exec(create_table_sql(def, true));
      created.push_back(name);
      Statement ins(db_, insert_sql(def, true, "temp"));
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) ins.bind(static_cast<int>(c + 1), row[c]);
        if (sqlite3_step(ins.get()) != SQLITE_DONE)
          throw Error(ErrorCode::Storage, std::string("materialization failed: ") + sqlite3_errmsg(db_));
        ins.reset();
      }
    }

    Deadline deadline{Clock::now() + timeout};
    sqlite3_progress_handler(db_, 1000, progress_callback, &deadline);
    std::string text(sql);
    Statement stmt(db_, text);
    if (!sqlite3_stmt_readonly(stmt.get()))
      throw Error(ErrorCode::ReadOnly, "read-only violation", text);
    int ncol = sqlite3_column_count(stmt.get());
    std::vector<std::string> names;
    std::vector<std::optional<ColumnType>> declared;
    for (int c = 0; c < ncol; ++c) {
      const char* n = sqlite3_column_name(stmt.get(), c);
      names.emplace_back(n ? n : "");
      declared.push_back(decl_to_type(sqlite3_column_decltype(stmt.get(), c)));
    }
    std::vector<Row> rows;
    int rc;
    while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
      Row row;
      row.reserve(static_cast<std::size_t>(ncol));
      for (int c = 0; c < ncol; ++c) row.push_back(read_column(stmt.get(), c));
      rows.push_back(std::move(row));
    }
    sqlite3_progress_handler(db_, 0, nullptr, nullptr);
    if (rc != SQLITE_DONE) {
      if (deadline.expired)
        throw Error(ErrorCode::Timeout, "query exceeded " + std::to_string(timeout.count()) + " ms", text);
      throw Error(ErrorCode::Execution, std::string("engine error: ") + sqlite3_errmsg(db_), text);
    }
    drop_temps();
    auto frame = make_frame(std::move(names), declared, std::move(rows));
    frame.provenance.sql = text;
    if (session) frame.provenance.session_id = session->id();
    for (const auto& [name, _] : ephemeral) frame.provenance.materialized_tables.push_back(name);
    return frame;
  } catch (...) {
    sqlite3_progress_handler(db_, 0, nullptr, nullptr);
    drop_temps();
    throw;
  }
}

ResultFrame Store::read_table(std::string_view table) {
  const auto& def = table_def(table);
  if (def.tier != Tier::Persistent)
    throw Error(ErrorCode::Tier, "tier violation: " + def.name + " has no persistent backing");
  std::lock_guard lock(db_mutex_);
  Statement stmt(db_, order_by_pk_sql(def));
  std::vector<Row> rows;
  while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
    Row row;
    for (std::size_t c = 0; c < def.columns.size(); ++c) row.push_back(read_column(stmt.get(), static_cast<int>(c)));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> names;
  std::vector<std::optional<ColumnType>> types;
  for (const auto& c : def.columns) {
    names.push_back(c.name);
    types.push_back(c.type);
  }
  // Catalog types are authoritative for stored tables.
  ResultFrame frame;
  for (std::size_t c = 0; c < def.columns.size(); ++c) frame.columns.push_back({names[c], def.columns[c].type});
  for (auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = coerce_value(row[c], def.columns[c].type);
  frame.rows = std::move(rows);
  return frame;
}

std::vector<std::pair<std::string, std::string>> Store::canonical_tables() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& t : catalog_.tables)
    if (t.tier == Tier::Persistent) out.emplace_back(t.name, canonical_bytes(read_table(t.name)));
  return out;
}

std::string compute_snapshot_id(const std::vector<std::pair<std::string, std::string>>& tables) {
  std::string buf = "dsqa-snapshot\n";
  for (const auto& [name, bytes] : tables) {
    buf += "table " + name + " " + std::to_string(bytes.size()) + "\n";
    buf += bytes;
  }
  return sha256_hex(buf);
}

Snapshot Store::take_snapshot() {
  std::unique_lock writer(writer_mutex_, std::try_to_lock);
  if (!writer.owns_lock()) throw Error(ErrorCode::Busy, "ingest in progress; snapshot unavailable");
  Snapshot snap;
  snap.tables = canonical_tables();
  snap.snapshot_id = compute_snapshot_id(snap.tables);
  snap.created_at = utc_now_iso8601();
  snap.schema_version = catalog_.version;
  std::lock_guard lock(content_mutex_);
  content_id_ = snap.snapshot_id;
  return snap;
}

std::string Store::content_id() {
  {
    std::lock_guard lock(content_mutex_);
    if (content_id_) return *content_id_;
  }
  auto id = compute_snapshot_id(canonical_tables());
  std::lock_guard lock(content_mutex_);
  content_id_ = id;
  return id;
}

void Store::invalidate_content_id() {
  std::lock_guard lock(content_mutex_);
  content_id_.reset();
}

void Store::restore(const Snapshot& snapshot) {
  if (!schema_applied_) throw Error(ErrorCode::Schema, "schema not applied");
  if (snapshot.schema_version != catalog_.version)
    throw Error(ErrorCode::Schema, "snapshot schema version " + std::to_string(snapshot.schema_version) +
                                       " does not match store version " + std::to_string(catalog_.version));
  std::vector<std::pair<const TableDef*, ResultFrame>> frames;
  for (const auto& [name, bytes] : snapshot.tables) {
    const auto& def = table_def(name);
    if (def.tier != Tier::Persistent) throw Error(ErrorCode::Tier, "snapshot contains ephemeral table " + name);
    auto frame = parse_canonical(bytes);
    if (frame.columns.size() != def.columns.size())
      throw Error(ErrorCode::Schema, "snapshot table " + name + " has a different column set");
    for (std::size_t c = 0; c < def.columns.size(); ++c)
      if (frame.columns[c].name != def.columns[c].name)
        throw Error(ErrorCode::Schema, "snapshot table " + name + " column mismatch at " + frame.columns[c].name);
    check_rows(def, frame.rows);
    frames.emplace_back(&def, std::move(frame));
  }
  std::lock_guard writer(writer_mutex_);
  std::lock_guard lock(db_mutex_);
  exec("BEGIN");
  try {
    for (const auto& t : catalog_.tables)
      if (t.tier == Tier::Persistent) exec("DELETE FROM " + t.name);
    for (const auto& [def, frame] : frames) {
      Statement stmt(db_, insert_sql(*def, false));
      for (const auto& row : frame.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) stmt.bind(static_cast<int>(c + 1), row[c]);
        if (sqlite3_step(stmt.get()) != SQLITE_DONE)
          throw Error(ErrorCode::Storage, std::string("restore failed: ") + sqlite3_errmsg(db_));
        stmt.reset();
      }
    }
    exec("COMMIT");
  } catch (...) {
    exec("ROLLBACK");
    throw;
  }
  invalidate_content_id();
}

std::uint64_t Store::storage_size() const {
  std::lock_guard lock(db_mutex_);
  auto pragma = [&](const char* sql) -> std::uint64_t {
    sqlite3_stmt* stmt = nullptr;
    std::uint64_t v = 0;
    if (sqlite3_prepare_v2(db_, sql, -1, &stmt, nullptr) == SQLITE_OK && sqlite3_step(stmt) == SQLITE_ROW)
      v = static_cast<std::uint64_t>(sqlite3_column_int64(stmt, 0));
    sqlite3_finalize(stmt);
    return v;
  };
  return pragma("PRAGMA main.page_count") * pragma("PRAGMA main.page_size");
}

// ---------------------------------------------------------------- archives

void save_snapshot(const Snapshot& snapshot, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json manifest;
  manifest["snapshot_id"] = snapshot.snapshot_id;
  manifest["created_at"] = snapshot.created_at;
  manifest["schema_version"] = snapshot.schema_version;
  manifest["tables"] = json::array();
  for (const auto& [name, bytes] : snapshot.tables) {
    write_file_atomic((fs::path(dir) / (name + ".tsv")).string(), bytes);
    manifest["tables"].push_back({{"name", name}, {"file", name + ".tsv"}, {"sha256", sha256_hex(bytes)}});
  }
  write_file_atomic((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

Snapshot load_snapshot(const std::string& dir) {
  namespace fs = std::filesystem;
  auto manifest_path = (fs::path(dir) / "manifest.json").string();
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "snapshot manifest " + manifest_path + ": " + e.what());
  }
  Snapshot snap;
  snap.snapshot_id = manifest.at("snapshot_id").get<std::string>();
  snap.created_at = manifest.value("created_at", "");
  snap.schema_version = manifest.value("schema_version", 1);
  for (const auto& t : manifest.at("tables")) {
    auto name = t.at("name").get<std::string>();
    snap.tables.emplace_back(name, read_file((fs::path(dir) / t.at("file").get<std::string>()).string()));
  }
  if (compute_snapshot_id(snap.tables) != snap.snapshot_id)
    throw Error(ErrorCode::Parse, "snapshot archive " + dir + " does not hash to its manifest id");
  return snap;
}

}  // namespace dsqa
