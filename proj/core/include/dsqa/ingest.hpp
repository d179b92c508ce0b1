#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dsqa/http.hpp"
#include "dsqa/store.hpp"

namespace dsqa {

enum class EndpointKind { Bootstrap, Fixtures, ElementSummary };
enum class IngestMode { Live, Replay };

std::string_view to_string(EndpointKind kind);
std::string_view to_string(IngestMode mode);

struct SourceEndpoint {
  EndpointKind kind = EndpointKind::Bootstrap;
  std::string url_template;
  std::vector<std::string> requires_params;
};

/// The three FPL endpoints. Templates are relative to the API base URL.
const SourceEndpoint& endpoint(EndpointKind kind);

using EndpointParams = std::map<std::string, std::string>;

/// Substitutes `{name}` placeholders. Throws Error(Config) when a required
/// parameter is missing or the template names one not listed in requires.
std::string endpoint_url(const SourceEndpoint& ep, const EndpointParams& params);

/// Replay file name for one endpoint call, e.g. `element-summary_71.json`.
std::string fixture_file_name(const SourceEndpoint& ep, const EndpointParams& params);

struct IngestReport {
  EndpointKind endpoint = EndpointKind::Bootstrap;
  std::string table;
  std::size_t fetched_rows = 0;
  std::size_t upserted = 0;
  std::size_t deduplicated = 0;
  std::int64_t duration_ms = 0;
  IngestMode mode = IngestMode::Replay;
  /// Payload fields that are neither mapped nor listed as ignored.
  std::vector<std::string> unknown_fields;
};

std::string report_line(const IngestReport& report);

/// Raw payload provider for one endpoint call.
class PayloadSource {
 public:
  virtual ~PayloadSource() = default;
  virtual IngestMode mode() const = 0;
  /// Returns the JSON body. Throws Error(Ingest) (retryable) when the
  /// endpoint cannot be reached.
  virtual std::string fetch(const SourceEndpoint& ep, const EndpointParams& params) = 0;
};

/// Reads recorded payloads from a fixtures directory.
class ReplaySource : public PayloadSource {
 public:
  explicit ReplaySource(std::string dir);
  IngestMode mode() const override { return IngestMode::Replay; }
  std::string fetch(const SourceEndpoint& ep, const EndpointParams& params) override;
  const std::string& dir() const { return dir_; }
  /// `captured_at` from the directory manifest, empty when absent.
  std::string captured_at() const;

 private:
  std::string dir_;
};

/// Performs one GET; returns the body or throws. Injected so retry logic can
/// be exercised without a network.
using HttpGet = std::function<std::string(const std::string& url)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
};

class LiveSource : public PayloadSource {
 public:
  explicit LiveSource(std::string base_url = "https://fantasy.premierleague.com/api/", HttpGet get = {},
                      Sleeper sleep = {}, RetryPolicy policy = {});
  IngestMode mode() const override { return IngestMode::Live; }
  std::string fetch(const SourceEndpoint& ep, const EndpointParams& params) override;

 private:
  std::string base_url_;
  HttpGet get_;
  Sleeper sleep_;
  RetryPolicy policy_;
};

/// API-field to column mapping, loaded from a JSON document kept in the data
/// directory. See docs/formats.md.
class FieldMap {
 public:
  static FieldMap from_json(std::string_view json_text);
  static FieldMap load(const std::string& path);

  struct Column {
    std::string column;
    std::string field;       // payload field name, or "$player_id" for the request parameter
    std::string convert;     // converter name, empty = identity by column type
  };
  struct TableMap {
    std::string table;
    EndpointKind endpoint = EndpointKind::Bootstrap;
    std::string array;  // key of the record array in the payload, empty = payload is the array
    std::vector<Column> columns;
    std::vector<std::string> ignored;
  };

  const TableMap& table(std::string_view name) const;
  const std::vector<TableMap>& tables() const { return tables_; }

 private:
  std::vector<TableMap> tables_;
};

/// Glue between a payload source, the field map and the store.
class Ingestor {
 public:
  Ingestor(Store& store, PayloadSource& source, FieldMap map);

  /// Refreshes teams, players and fixtures. Holds the store's writer lock.
  std::vector<IngestReport> sync_persistent();

  /// Normalized rows of one ephemeral table for one player. Never writes the
  /// persistent tier.
  std::vector<Row> fetch_player_detail(std::int64_t player_id, std::string_view table);

  PayloadSource& source() { return source_; }

 private:
  std::map<std::int64_t, std::string> team_names();

  Store& store_;
  PayloadSource& source_;
  FieldMap map_;
};

/// Normalizes one payload's records into rows for `table`. Exposed for tests.
/// `context` supplies team names for name converters and the request player id.
struct NormalizeContext {
  std::map<std::int64_t, std::string> team_names;
  std::int64_t player_id = 0;
};
std::vector<Row> normalize_records(const FieldMap::TableMap& map, const TableDef& def, std::string_view payload,
                                   const NormalizeContext& context, std::vector<std::string>* unknown_fields = nullptr,
                                   std::size_t* record_count = nullptr);

}  // namespace dsqa
