// Copyright 2026 The QShield Authors. All Rights Reserved.
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

#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qshield::gateway {

// Single writer for all append-only JSONL files of the service. Appends are
// applied in submission order by one background thread.
class Journal {
 public:
  Journal();
  ~Journal();

  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  // Queues `line` (without trailing newline) and returns immediately.
  void append(const std::filesystem::path& path, std::string line);

  // Queues `line` and waits until it has been written and fsync'd.
  void append_durable(const std::filesystem::path& path, std::string line);

  // Waits until everything queued so far is on disk.
  void flush();

 private:
  struct Entry {
    std::filesystem::path path;
    std::string line;
    bool sync = false;
    std::uint64_t ticket = 0;
  };

  std::uint64_t enqueue(const std::filesystem::path& path, std::string line, bool sync);
  void wait_for(std::uint64_t ticket);
  void run();
  std::FILE* file_for(const std::filesystem::path& path);

  std::mutex mu_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  std::deque<Entry> queue_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t written_ = 0;
  bool stopping_ = false;
  std::map<std::filesystem::path, std::FILE*> files_;  // writer thread only
  std::thread worker_;
};

struct RecoveredLines {
  std::vector<std::string> lines;
  std::vector<std::string> warnings;
};

// Reads complete newline-terminated lines. A trailing fragment without a
// newline (an interrupted append) is dropped, reported, and truncated away
// so later appends start on a clean line. Missing file yields no lines.
RecoveredLines recover_jsonl(const std::filesystem::path& path);

}  // namespace qshield::gateway
