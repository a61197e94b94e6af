#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rulediff/errors.hpp"
#include "rulediff/event_log.hpp"
#include "rulediff/io_util.hpp"

namespace rulediff {

// Column mapping for tabular logs. An unset order column means "use a
// 'timestamp' column when the header has one, else keep file row order";
// kRowOrder forces row order.
struct CsvMapping {
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::optional<std::string> order_column;

  static constexpr const char* kRowOrder = "none";
};

namespace detail {

// RFC 4180 field splitting; handles quoted fields, doubled quotes, and bare
// CR/LF line ends. Returns rows of fields; the terminating newline of the
// last row is optional.
inline std::vector<std::vector<std::string>> split_csv(const std::string& text,
                                                       const std::string& origin) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field += '"';  // stray quote inside unquoted field; keep verbatim
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes)
    throw ParseError("unterminated quoted field in '" + origin + "' (line " +
                     std::to_string(line) + ")");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

// days-from-civil (Howard Hinnant's algorithm); deterministic and
// locale-free.
inline std::int64_t days_from_civil(std::int64_t y, std::int64_t m, std::int64_t d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

inline bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len,
                            std::int64_t& out) {
  if (pos + len > s.size()) return false;
  std::int64_t v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

// ISO-8601 timestamp (date, optional time, optional fraction, optional
// offset or Z) to microseconds since the epoch. Returns false when the text
// does not match.
inline bool parse_iso_timestamp(std::string_view s, std::int64_t& micros_out) {
  std::int64_t y, mo, d;
  if (!parse_fixed_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' ||
      !parse_fixed_int(s, 5, 2, mo) || s[7] != '-' || !parse_fixed_int(s, 8, 2, d))
    return false;
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return false;
  std::int64_t h = 0, mi = 0, sec = 0, frac_micro = 0, offset_min = 0;
  std::size_t i = 10;
  if (i < s.size()) {
    if (s[i] != 'T' && s[i] != ' ') return false;
    ++i;
    if (!parse_fixed_int(s, i, 2, h) || i + 5 > s.size() || s[i + 2] != ':' ||
        !parse_fixed_int(s, i + 3, 2, mi))
      return false;
    i += 5;
    if (i < s.size() && s[i] == ':') {
      if (!parse_fixed_int(s, i + 1, 2, sec)) return false;
      i += 3;
    }
    if (h > 23 || mi > 59 || sec > 60) return false;
    if (i < s.size() && s[i] == '.') {
      ++i;
      std::int64_t scale = 100000;
      bool any = false;
      while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        if (scale > 0) frac_micro += (s[i] - '0') * scale;
        scale /= 10;
        ++i;
        any = true;
      }
      if (!any) return false;
    }
    if (i < s.size()) {
      if (s[i] == 'Z') {
        ++i;
      } else if (s[i] == '+' || s[i] == '-') {
        const int sign = s[i] == '-' ? -1 : 1;
        std::int64_t oh, om = 0;
        if (!parse_fixed_int(s, i + 1, 2, oh)) return false;
        i += 3;
        if (i < s.size() && s[i] == ':') {
          if (!parse_fixed_int(s, i + 1, 2, om)) return false;
          i += 3;
        } else if (parse_fixed_int(s, i, 2, om)) {
          i += 2;
        }
        offset_min = sign * (oh * 60 + om);
      }
    }
    if (i != s.size()) return false;
  }
  const std::int64_t days = days_from_civil(y, mo, d);
  micros_out =
      (((days * 24 + h) * 60 + mi - offset_min) * 60 + sec) * 1000000 + frac_micro;
  return true;
}

inline bool parse_full_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

}  // namespace detail

// Reads a tabular log: one event per row, grouped into traces by the case
// column in order of first appearance. When an order column applies, events
// within a case are stably sorted by its value (all-numeric, else all
// ISO-8601 timestamps); ties and the no-order-column path keep file row
// order.
inline EventLog parse_csv(const std::string& path, const CsvMapping& mapping = {}) {
  const std::string text = read_input_file(path);
  const auto rows = detail::split_csv(text, path);
  EventLog log;
  if (rows.empty()) return log;

  const auto& header = rows.front();
  const auto col_of = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  const auto require_col = [&](const std::string& name) -> std::size_t {
    if (auto c = col_of(name)) return *c;
    std::string cols;
    for (const auto& h : header) {
      if (!cols.empty()) cols += ", ";
      cols += "'" + h + "'";
    }
    throw ConfigError("column '" + name + "' not found in '" + path +
                      "' (available: " + cols + ")");
  };

  const std::size_t case_col = require_col(mapping.case_column);
  const std::size_t act_col = require_col(mapping.activity_column);
  std::optional<std::size_t> order_col;
  if (mapping.order_column.has_value()) {
    if (*mapping.order_column != CsvMapping::kRowOrder)
      order_col = require_col(*mapping.order_column);
  } else if (auto c = col_of("timestamp")) {
    order_col = *c;
  }

  struct Row {
    std::string activity;
    std::string order_text;
    std::size_t file_row;
  };
  std::vector<std::vector<Row>> cases;
  std::unordered_map<std::string, std::size_t> case_index;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    const std::size_t needed =
        std::max({case_col, act_col, order_col.value_or(0)}) + 1;
    if (fields.size() < needed)
      throw ParseError("row " + std::to_string(r + 1) + " of '" + path + "' has " +
                       std::to_string(fields.size()) + " fields, expected at least " +
                       std::to_string(needed));
    const std::string& case_id = fields[case_col];
    const std::string& activity = fields[act_col];
    if (activity.empty())
      throw ParseError("row " + std::to_string(r + 1) + " of '" + path +
                       "' has an empty activity");
    auto [it, inserted] = case_index.try_emplace(case_id, cases.size());
    if (inserted) cases.emplace_back();
    cases[it->second].push_back(
        Row{activity, order_col ? fields[*order_col] : std::string{}, r});
  }

  if (order_col) {
    // The order column must be homogeneous: all numeric, or all ISO-8601.
    bool all_numeric = true;
    for (const auto& c : cases) {
      for (const auto& row : c) {
        double unused;
        if (!detail::parse_full_double(row.order_text, unused)) {
          all_numeric = false;
          break;
        }
      }
      if (!all_numeric) break;
    }
    for (auto& c : cases) {
      std::vector<std::pair<double, std::size_t>> keyed(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) {
        double key = 0.0;
        if (all_numeric) {
          detail::parse_full_double(c[i].order_text, key);
        } else {
          std::int64_t micros;
          if (!detail::parse_iso_timestamp(c[i].order_text, micros))
            throw ParseError("row " + std::to_string(c[i].file_row + 1) + " of '" + path +
                             "': cannot parse order key '" + c[i].order_text + "'");
          key = static_cast<double>(micros);
        }
        keyed[i] = {key, i};
      }
      std::stable_sort(keyed.begin(), keyed.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<Row> sorted;
      sorted.reserve(c.size());
      for (const auto& [key, idx] : keyed) sorted.push_back(std::move(c[idx]));
      c = std::move(sorted);
    }
  }

  for (const auto& c : cases) {
    std::vector<std::string> events;
    events.reserve(c.size());
    for (const auto& row : c) events.push_back(row.activity);
    log.add_trace(events);
  }
  return log;
}

namespace detail {

inline void write_csv_field(std::ostream& out, std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos ||
      (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace detail

// Writes one row per event, expanding trace multiplicities into distinct
// case ids; parse_csv on the result reconstructs the same trace multiset.
inline void write_csv(const EventLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "case,activity\n";
  std::size_t case_no = 0;
  for (const auto& t : log.traces()) {
    for (std::int64_t copy = 0; copy < t.count; ++copy) {
      const std::string case_id = "case_" + std::to_string(case_no++);
      for (ActivityId e : t.events) {
        detail::write_csv_field(out, case_id);
        out << ',';
        detail::write_csv_field(out, log.alphabet().name(e));
        out << '\n';
      }
    }
  }
  if (!out) throw ParseError("error while writing '" + path + "'");
}

}  // namespace rulediff
