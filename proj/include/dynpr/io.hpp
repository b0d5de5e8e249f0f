#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dynpr/dynrank.hpp"
#include "dynpr/error.hpp"
#include "dynpr/forecast.hpp"
#include "dynpr/score_vector.hpp"
#include "dynpr/scores.hpp"
#include "dynpr/teleport.hpp"

namespace dynpr {

// All numeric output uses 17 significant digits, which round-trips doubles.
inline std::string format_number(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("failed to format number");
  return std::string(buf, ptr);
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view tok, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "malformed number '" + std::string(tok) + "'");
  }
  return value;
}

inline void check_sink(std::ostream& out) {
  if (!out) throw Error("output stream failed");
}

// Reads the next line that is neither blank nor a `#` comment, except that
// `# key=value` comments are collected into `meta`.
inline bool next_record(std::istream& in, std::string& raw, std::size_t& line_no,
                        std::map<std::string, std::string>* meta = nullptr) {
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (meta && eq != std::string_view::npos) {
        (*meta)[std::string(trim(line.substr(1, eq - 1)))] = std::string(trim(line.substr(eq + 1)));
      }
      continue;
    }
    return true;
  }
  return false;
}

}  // namespace detail

enum class SequenceLayout { dense, triples };

/// Keeps columns 0, every, 2 every, ... (ceil(K / every) columns). The
/// sample spacing grows by `every`.
inline RankSequence subsample(const RankSequence& seq, std::size_t every) {
  if (every == 0) throw ConfigError("subsample stride must be positive");
  RankSequence out(seq.num_nodes(), seq.h() * static_cast<double>(every));
  for (std::size_t k = 0; k < seq.num_samples(); k += every) out.append(seq.times()[k], seq.column(k));
  return out;
}

/// Dense layout: header `node,<t_1>,...,<t_K>` then one row per node.
/// Triples layout: header `time,node,value` then one row per entry.
/// Both start with a `# h=<spacing>` line so the sequence reloads exactly.
inline void write_rank_sequence(const RankSequence& seq, std::ostream& out,
                                SequenceLayout layout = SequenceLayout::triples,
                                std::size_t every = 1) {
  std::optional<RankSequence> thinned;
  if (every != 1) thinned = subsample(seq, every);
  const RankSequence& src = thinned ? *thinned : seq;
  out << "# h=" << format_number(src.h()) << '\n';
  if (layout == SequenceLayout::dense) {
    out << "node";
    for (double t : src.times()) out << ',' << format_number(t);
    out << '\n';
    for (std::size_t i = 0; i < src.num_nodes(); ++i) {
      out << i;
      for (std::size_t k = 0; k < src.num_samples(); ++k) out << ',' << format_number(src.at(i, k));
      out << '\n';
    }
  } else {
    out << "time,node,value\n";
    for (std::size_t k = 0; k < src.num_samples(); ++k) {
      const std::string t = format_number(src.times()[k]);
      for (std::size_t i = 0; i < src.num_nodes(); ++i) {
        out << t << ',' << i << ',' << format_number(src.at(i, k)) << '\n';
      }
    }
  }
  detail::check_sink(out);
}

/// Reads either layout, detected from the header.
inline RankSequence read_rank_sequence(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::string raw;
  std::size_t line_no = 0;
  if (!detail::next_record(in, raw, line_no, &meta)) throw InputError("rank sequence is empty");
  const auto header = detail::split_csv(detail::trim(raw));

  double h = 1.0;
  if (auto it = meta.find("h"); it != meta.end()) h = detail::parse_double(it->second, line_no);

  if (header.size() == 3 && header[0] == "time" && header[1] == "node" && header[2] == "value") {
    std::vector<double> times;
    std::vector<std::vector<double>> cols;
    std::size_t n = 0;
    while (detail::next_record(in, raw, line_no)) {
      const auto f = detail::split_csv(detail::trim(raw));
      if (f.size() != 3) throw ParseError(line_no, "expected time,node,value");
      const double t = detail::parse_double(f[0], line_no);
      const long long node = detail::parse_integer(f[1], line_no, "node id");
      const double value = detail::parse_double(f[2], line_no);
      if (times.empty() || t != times.back()) {
        if (!times.empty() && !(t > times.back())) throw ParseError(line_no, "times must increase");
        times.push_back(t);
        cols.emplace_back();
      }
      if (node != static_cast<long long>(cols.back().size())) {
        throw ParseError(line_no, "expected node " + std::to_string(cols.back().size()));
      }
      cols.back().push_back(value);
    }
    if (cols.empty()) throw InputError("rank sequence has no samples");
    n = cols.front().size();
    RankSequence seq(n, h);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k].size() != n) throw InputError("ragged rank sequence column");
      seq.append(times[k], cols[k]);
    }
    return seq;
  }

  if (header.empty() || header[0] != "node") {
    throw ParseError(line_no, "unrecognized rank sequence header");
  }
  std::vector<double> times;
  for (std::size_t c = 1; c < header.size(); ++c) times.push_back(detail::parse_double(header[c], line_no));
  std::vector<std::vector<double>> rows;
  while (detail::next_record(in, raw, line_no)) {
    const auto f = detail::split_csv(detail::trim(raw));
    if (f.size() != times.size() + 1) throw ParseError(line_no, "row width differs from header");
    if (detail::parse_integer(f[0], line_no, "node id") != static_cast<long long>(rows.size())) {
      throw ParseError(line_no, "expected node " + std::to_string(rows.size()));
    }
    std::vector<double> row;
    for (std::size_t c = 1; c < f.size(); ++c) row.push_back(detail::parse_double(f[c], line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("rank sequence has no nodes");
  RankSequence seq(rows.size(), h);
  std::vector<double> col(rows.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][k];
    seq.append(times[k], col);
  }
  return seq;
}

/// `# kind=<kind>` then `node,value`.
inline void write_scores(const ScoreVector& s, std::ostream& out) {
  out << "# kind=" << to_string(s.kind) << '\n' << "node,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) out << i << ',' << format_number(s[i]) << '\n';
  detail::check_sink(out);
}

inline ScoreVector read_scores(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::string raw;
  std::size_t line_no = 0;
  if (!detail::next_record(in, raw, line_no, &meta)) throw InputError("score file is empty");
  const auto header = detail::split_csv(detail::trim(raw));
  if (header.size() != 2 || header[0] != "node" || header[1] != "value") {
    throw ParseError(line_no, "expected header 'node,value'");
  }
  std::vector<double> values;
  while (detail::next_record(in, raw, line_no)) {
    const auto f = detail::split_csv(detail::trim(raw));
    if (f.size() != 2) throw ParseError(line_no, "expected node,value");
    if (detail::parse_integer(f[0], line_no, "node id") != static_cast<long long>(values.size())) {
      throw ParseError(line_no, "expected node " + std::to_string(values.size()));
    }
    values.push_back(detail::parse_double(f[1], line_no));
  }
  if (values.empty()) throw InputError("score file has no entries");
  ScoreKind kind = ScoreKind::external;
  if (auto it = meta.find("kind"); it != meta.end()) kind = parse_score_kind(it->second);
  return ScoreVector(std::move(values), kind);
}

inline void write_profile(const SimilarityProfile& p, std::ostream& out) {
  out << "k,isim\n";
  for (std::size_t j = 0; j < p.values.size(); ++j) {
    out << j + 1 << ',' << format_number(p.values[j]) << '\n';
  }
  detail::check_sink(out);
}

inline void write_report(const ForecastReport& report, std::ostream& out) {
  out << "# smape = mean over points of |forecast - actual| / ((|forecast| + |actual|) / 2), "
         "0/0 terms count as 0\n";
  out << "dataset,partition,model,smape\n";
  for (const auto& row : report.rows) {
    out << row.dataset << ',' << row.partition << ',' << row.model << ','
        << format_number(row.smape) << '\n';
  }
  detail::check_sink(out);
}

/// `node,time,value` triples.
inline void write_feature_series(std::span<const FeatureSeries> series, std::ostream& out) {
  out << "node,time,value\n";
  for (const auto& s : series) {
    for (std::size_t t = 0; t < s.values.size(); ++t) {
      out << s.node << ',' << format_number(s.times[t]) << ',' << format_number(s.values[t]) << '\n';
    }
  }
  detail::check_sink(out);
}

/// Writes the raw counts in the `period node count` format load_teleport_series reads.
inline void write_teleport_series(const TeleportSeries& series, std::ostream& out) {
  out << "period node count\n";
  for (std::size_t p = 0; p < series.num_periods(); ++p) {
    const auto& period = series.period(p);
    if (period.uniform) out << p << " 0 0\n";
    for (std::size_t k = 0; k < period.ids.size(); ++k) {
      out << p << ' ' << period.ids[k] << ' ' << format_number(period.counts[k]) << '\n';
    }
  }
  detail::check_sink(out);
}

}  // namespace dynpr
