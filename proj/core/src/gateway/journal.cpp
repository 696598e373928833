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

#include "qshield/gateway/journal.hpp"

#include <unistd.h>

#include <fstream>
#include <iterator>

#include "qshield/error.hpp"

namespace qshield::gateway {

Journal::Journal() : worker_([this] { run(); }) {}

Journal::~Journal() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  work_cv_.notify_all();
  worker_.join();
  for (auto& [path, f] : files_) std::fclose(f);
}

std::uint64_t Journal::enqueue(const std::filesystem::path& path, std::string line, bool sync) {
  std::uint64_t ticket;
  {
    std::lock_guard lock(mu_);
    ticket = ++next_ticket_;
    queue_.push_back({path, std::move(line), sync, ticket});
  }
  work_cv_.notify_one();
  return ticket;
}

void Journal::wait_for(std::uint64_t ticket) {
  std::unique_lock lock(mu_);
  done_cv_.wait(lock, [&] { return written_ >= ticket; });
}

void Journal::append(const std::filesystem::path& path, std::string line) {
  enqueue(path, std::move(line), false);
}

void Journal::append_durable(const std::filesystem::path& path, std::string line) {
  wait_for(enqueue(path, std::move(line), true));
}

void Journal::flush() {
  std::uint64_t ticket;
  {
    std::lock_guard lock(mu_);
    ticket = next_ticket_;
  }
  wait_for(ticket);
}

std::FILE* Journal::file_for(const std::filesystem::path& path) {
  auto it = files_.find(path);
  if (it != files_.end()) return it->second;
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (f == nullptr) throw Error(ErrorCode::kIo, "cannot open journal " + path.string());
  files_.emplace(path, f);
  return f;
}

void Journal::run() {
  for (;;) {
    Entry entry;
    {
      std::unique_lock lock(mu_);
      work_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      entry = std::move(queue_.front());
      queue_.pop_front();
    }
    try {
      std::FILE* f = file_for(entry.path);
      entry.line.push_back('\n');
      std::fwrite(entry.line.data(), 1, entry.line.size(), f);
      std::fflush(f);
      if (entry.sync) ::fsync(::fileno(f));
    } catch (const Error&) {
      // Unwritable journal: the entry is lost but waiters must not hang.
    }
    {
      std::lock_guard lock(mu_);
      written_ = entry.ticket;
    }
    done_cv_.notify_all();
  }
}

RecoveredLines recover_jsonl(const std::filesystem::path& path) {
  RecoveredLines out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::size_t start = 0;
  while (start < content.size()) {
    const auto nl = content.find('\n', start);
    if (nl == std::string::npos) {
      out.warnings.push_back(path.filename().string() + ": discarded " +
                             std::to_string(content.size() - start) +
                             " trailing bytes of an incomplete record");
      std::filesystem::resize_file(path, start);
      break;
    }
    if (nl > start) out.lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

}  // namespace qshield::gateway
