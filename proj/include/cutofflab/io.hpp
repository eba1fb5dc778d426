#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cutofflab/errors.hpp"
#include "cutofflab/tree.hpp"
#include "cutofflab/verify.hpp"

namespace cutofflab {

/// Shortest decimal form that round-trips the double exactly.
inline std::string fmt_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw UsageError("cannot parse floating point value '" + s + "'");
  return x;
}

inline long long parse_int(const std::string& s) {
  long long x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw UsageError("cannot parse integer '" + s + "'");
  return x;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Parses a tree-spec document. Accepts either a single tree
///   {"children": [2, 2, 1]}
/// or a family generator
///   {"family": "segment" | "binary" | "custom", "h_range": [a, b],
///    "children": [...]}       (children required for "custom")
/// and returns the trees in generation order.
inline std::vector<TreeProfile> trees_from_spec(const nlohmann::json& doc) {
  try {
    if (doc.contains("family")) {
      const std::string family = doc.at("family").get<std::string>();
      std::vector<int> base;
      if (doc.contains("children")) base = doc.at("children").get<std::vector<int>>();
      if (!doc.contains("h_range")) {
        if (family == "custom" && !base.empty()) return {build_profile(base)};
        throw UsageError("family spec needs an h_range");
      }
      const auto range = doc.at("h_range").get<std::vector<long long>>();
      if (range.size() != 2 || range[0] < 1 || range[1] < range[0])
        throw UsageError("h_range must be [a, b] with 1 <= a <= b");
      std::vector<TreeProfile> trees;
      for (long long h = range[0]; h <= range[1]; ++h) {
        std::vector<int> c;
        if (family == "segment") {
          c.assign(static_cast<size_t>(h), 1);
        } else if (family == "binary") {
          c.assign(static_cast<size_t>(h), 2);
        } else if (family == "custom") {
          if (static_cast<long long>(base.size()) < h)
            throw UsageError("custom family: children array shorter than h_range top");
          c.assign(base.begin(), base.begin() + h);
        } else {
          throw UsageError("unknown family '" + family + "'");
        }
        trees.push_back(build_profile(c));
      }
      return trees;
    }
    return {build_profile(doc.at("children").get<std::vector<int>>())};
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed tree spec: ") + e.what());
  }
}

inline std::vector<TreeProfile> trees_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open tree spec file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
  return trees_from_spec(doc);
}

inline TreeProfile single_tree_from_file(const std::string& path) {
  const auto trees = trees_from_file(path);
  if (trees.size() != 1)
    throw UsageError("'" + path + "' describes a family; a single tree is required here");
  return trees.front();
}

// ---------------------------------------------------------------------------
// Report CSV. Long format: one row per (tree, check), with the headline
// quantities repeated so the file is self-contained. Timing never goes into
// the file; identical invocations must produce identical bytes.
// ---------------------------------------------------------------------------

inline constexpr const char* kReportHeader =
    "tree,n,h,t_mix,t_rel,ratio,min_pair_ratio,check,lhs,rhs,margin,pass";

inline void write_report_csv(std::ostream& os, const std::vector<VerifyReport>& reports) {
  os << kReportHeader << '\n';
  for (const VerifyReport& r : reports)
    for (const CheckRecord& c : r.checks)
      os << r.tree_id << ',' << r.n << ',' << r.h << ',' << r.t_mix << ',' << fmt_double(r.t_rel)
         << ',' << fmt_double(r.ratio) << ',' << fmt_double(r.min_pair_ratio) << ',' << c.name
         << ',' << fmt_double(c.lhs) << ',' << fmt_double(c.rhs) << ',' << fmt_double(c.margin)
         << ',' << (c.pass ? 1 : 0) << '\n';
}

inline std::vector<VerifyReport> read_report_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kReportHeader)
    throw UsageError("not a verify report: bad header");
  std::vector<VerifyReport> reports;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12) throw UsageError("bad report row: '" + line + "'");
    if (reports.empty() || reports.back().tree_id != f[0]) {
      VerifyReport r;
      r.tree_id = f[0];
      r.n = parse_int(f[1]);
      r.h = static_cast<int>(parse_int(f[2]));
      r.t_mix = parse_int(f[3]);
      r.t_rel = parse_double(f[4]);
      r.ratio = parse_double(f[5]);
      r.min_pair_ratio = parse_double(f[6]);
      reports.push_back(std::move(r));
    }
    CheckRecord c;
    c.name = f[7];
    c.lhs = parse_double(f[8]);
    c.rhs = parse_double(f[9]);
    c.margin = parse_double(f[10]);
    c.pass = parse_int(f[11]) != 0;
    reports.back().checks.push_back(std::move(c));
  }
  return reports;
}

inline void write_cutoff_csv(std::ostream& os, const std::vector<CutoffRow>& rows,
                             const std::vector<double>& eps_grid) {
  os << "index,tree,n,t_rel";
  for (double e : eps_grid) os << ",tmix_" << fmt_double(e);
  os << ",ratio_q25_q75,tmix25_over_trel\n";
  for (const CutoffRow& r : rows) {
    os << r.index << ',' << r.tree_id << ',' << r.n << ',' << fmt_double(r.t_rel);
    for (long long t : r.t_mix) os << ',' << t;
    os << ',' << fmt_double(r.ratio_precutoff) << ',' << fmt_double(r.ratio_criterion) << '\n';
  }
}

}  // namespace cutofflab
