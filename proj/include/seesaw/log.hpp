// Copyright 2026 The seesaw-balance Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace seesaw {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Level comes from SEESAW_LOG_LEVEL in {error, info, debug}; default error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SEESAW_LOG_LEVEL");
    if (env == nullptr) return LogLevel::Error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

inline void log_at(LogLevel level, const char* tag, const char* fmt, va_list args) {
  if (level > log_level()) return;
  std::fprintf(stderr, "[%s] ", tag);
  std::vfprintf(stderr, fmt, args);
  std::fprintf(stderr, "\n");
}

inline void log_error(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  log_at(LogLevel::Error, "error", fmt, args);
  va_end(args);
}

inline void log_info(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  log_at(LogLevel::Info, "info", fmt, args);
  va_end(args);
}

inline void log_debug(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  log_at(LogLevel::Debug, "debug", fmt, args);
  va_end(args);
}

}  // namespace seesaw
