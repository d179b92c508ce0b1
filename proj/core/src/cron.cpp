#include "dsqa/cron.hpp"

#include <charconv>
#include <ctime>
#include <vector>

#include "dsqa/error.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

int parse_int(std::string_view s, std::string_view field) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::Config, "invalid cron " + std::string(field) + " value '" + std::string(s) + "'");
  return v;
}

template <std::size_t N>
bool parse_field(std::string_view text, int lo, int hi, std::string_view name, std::bitset<N>& out) {
  bool star = text == "*";
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    int step = 1;
    if (auto slash = part.find('/'); slash != std::string_view::npos) {
      step = parse_int(part.substr(slash + 1), name);
      if (step <= 0) throw Error(ErrorCode::Config, "invalid cron step in " + std::string(name));
      part = part.substr(0, slash);
    }
    int a = lo, b = hi;
    if (part != "*") {
      if (auto dash = part.find('-'); dash != std::string_view::npos) {
        a = parse_int(part.substr(0, dash), name);
        b = parse_int(part.substr(dash + 1), name);
      } else {
        a = b = parse_int(part, name);
        if (step != 1) b = hi;
      }
    }
    if (a < lo || b > hi || a > b)
      throw Error(ErrorCode::Config, "cron " + std::string(name) + " out of range: '" + std::string(text) + "'");
    for (int v = a; v <= b; v += step) out.set(static_cast<std::size_t>(v));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return star;
}

std::tm utc(SysTime t) {
  auto tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  return tm;
}

std::int64_t minute_index(SysTime t) {
  return std::chrono::duration_cast<std::chrono::minutes>(t.time_since_epoch()).count();
}

}  // namespace

CronExpr CronExpr::parse(std::string_view text) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) fields.push_back(std::move(cur));
  if (fields.size() != 5)
    throw Error(ErrorCode::Config, "cron expression needs 5 fields, got " + std::to_string(fields.size()) + ": '" +
                                       std::string(text) + "'");
  CronExpr e;
  e.text_ = std::string(trim(text));
  parse_field(fields[0], 0, 59, "minute", e.minute_);
  parse_field(fields[1], 0, 23, "hour", e.hour_);
  e.dom_star_ = parse_field(fields[2], 1, 31, "day-of-month", e.dom_);
  parse_field(fields[3], 1, 12, "month", e.month_);
  e.dow_star_ = parse_field(fields[4], 0, 7, "day-of-week", e.dow_);
  if (e.dow_.test(7)) e.dow_.set(0);
  return e;
}

bool CronExpr::matches(SysTime t) const {
  auto tm = utc(t);
  if (!minute_.test(tm.tm_min) || !hour_.test(tm.tm_hour) || !month_.test(tm.tm_mon + 1)) return false;
  bool dom = dom_.test(tm.tm_mday);
  bool dow = dow_.test(tm.tm_wday);
  // Classic cron: when both day fields are restricted, either may match.
  if (!dom_star_ && !dow_star_) return dom || dow;
  return dom && dow;
}

SysTime CronExpr::next_after(SysTime t) const {
  auto m = std::chrono::floor<std::chrono::minutes>(t) + std::chrono::minutes(1);
  // Five years of minutes bounds the search for expressions like Feb 30.
  for (int i = 0; i < 5 * 366 * 24 * 60; ++i, m += std::chrono::minutes(1))
    if (matches(m)) return m;
  throw Error(ErrorCode::Config, "cron expression never fires: " + text_);
}

RefreshScheduler::RefreshScheduler(CronExpr expr, Job job) : expr_(std::move(expr)), job_(std::move(job)) {}

RefreshScheduler::~RefreshScheduler() {
  cancel();
  wait_idle();
}

bool RefreshScheduler::on_tick(SysTime now) {
  if (cancelled_ || !expr_.matches(now)) return false;
  std::lock_guard lock(mutex_);
  auto minute = minute_index(now);
  if (minute == last_minute_) return false;
  last_minute_ = minute;
  if (running_) {
    ++skipped_;
    return false;
  }
  if (worker_.joinable()) worker_.join();
  running_ = true;
  ++runs_;
  worker_ = std::thread([this] {
    try {
      job_();
    } catch (...) {
      // A failed refresh leaves the previous data in place; the next tick retries.
    }
    {
      std::lock_guard done(mutex_);
      running_ = false;
    }
    cv_.notify_all();
  });
  return true;
}

void RefreshScheduler::start() {
  if (ticker_.joinable()) return;
  ticker_ = std::thread([this] {
    while (!cancelled_) {
      auto next = expr_.next_after(std::chrono::system_clock::now());
      {
        std::unique_lock lock(mutex_);
        cv_.wait_until(lock, next, [this] { return cancelled_.load(); });
      }
      if (cancelled_) break;
      on_tick(std::chrono::system_clock::now());
    }
  });
}

void RefreshScheduler::cancel() {
  {
    std::lock_guard lock(mutex_);
    cancelled_ = true;
  }
  cv_.notify_all();
  if (ticker_.joinable() && ticker_.get_id() != std::this_thread::get_id()) ticker_.join();
}

void RefreshScheduler::wait_idle() {
  {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return !running_; });
  }
  std::lock_guard lock(mutex_);
  if (worker_.joinable()) worker_.join();
}

}  // namespace dsqa
