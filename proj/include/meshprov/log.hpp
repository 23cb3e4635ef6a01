#pragma once

#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace meshprov {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

inline std::string_view to_string(LogLevel level) {
  switch (level) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warn: return "warn";
    case LogLevel::error: return "error";
  }
  return "info";
}

inline std::optional<LogLevel> parse_log_level(std::string_view text) {
  if (text == "debug") return LogLevel::debug;
  if (text == "info") return LogLevel::info;
  if (text == "warn" || text == "warning") return LogLevel::warn;
  if (text == "error") return LogLevel::error;
  return std::nullopt;
}

/// Plain-text line logger. Each line is prefixed with its level in brackets.
/// Thread-safe; writes to std::cerr unless another stream is given.
class Logger {
 public:
  explicit Logger(LogLevel threshold = LogLevel::info, std::ostream* out = &std::cerr)
      : threshold_(threshold), out_(out) {}

  void set_threshold(LogLevel level) { threshold_ = level; }
  LogLevel threshold() const { return threshold_; }
  bool enabled(LogLevel level) const { return out_ != nullptr && level >= threshold_; }

  void log(LogLevel level, std::string_view message) {
    if (!enabled(level)) return;
    std::lock_guard lock(mutex_);
    *out_ << '[' << to_string(level) << "] " << message << '\n';
  }

  void debug(std::string_view m) { log(LogLevel::debug, m); }
  void info(std::string_view m) { log(LogLevel::info, m); }
  void warn(std::string_view m) { log(LogLevel::warn, m); }
  void error(std::string_view m) { log(LogLevel::error, m); }

  /// Logger that discards everything.
  static Logger& null() {
    static Logger sink(LogLevel::error, nullptr);
    return sink;
  }

 private:
  LogLevel threshold_;
  std::ostream* out_;
  std::mutex mutex_;
};

}  // namespace meshprov
