#pragma once

#include <charconv>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dsc/report.hpp"
#include "dsc/workloads.hpp"

namespace dsc {

struct ParseError : std::runtime_error {
  size_t line;
  ParseError(size_t line_in, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_in) + ": " + msg),
        line(line_in) {}
};

// Shortest round-tripping decimal form; keeps generated files byte-stable.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::logic_error("to_chars failed");
  return std::string(buf, p);
}

// --- workload file format ---------------------------------------------------
//
//   # <tag>
//   SC <n> <m> <f> <C> <eps_hint>        |  DS <n> <Delta> <C> <eps_hint>
//   S <id> <cost> <elem...>              |  V <id> <cost>
//   + <e>   /  - <e>                     |  + <u> <v>  /  - <u> <v>

inline std::string serialize_workload(const Workload& w) {
  std::ostringstream os;
  if (!w.tag.empty()) os << "# " << w.tag << "\n";
  if (w.kind == Workload::kSetCover) {
    os << "SC " << w.n << ' ' << w.sets.size() << ' ' << w.f_or_delta << ' '
       << fmt_double(w.c_ratio) << ' ' << fmt_double(w.eps_hint) << "\n";
    for (uint32_t s = 0; s < w.sets.size(); ++s) {
      os << "S " << s << ' ' << fmt_double(w.sets[s].first);
      for (uint32_t e : w.sets[s].second) os << ' ' << e;
      os << "\n";
    }
    for (const auto& op : w.ops) os << op.op << ' ' << op.a << "\n";
  } else {
    os << "DS " << w.n << ' ' << w.f_or_delta << ' ' << fmt_double(w.c_ratio)
       << ' ' << fmt_double(w.eps_hint) << "\n";
    for (uint32_t v = 0; v < w.vertex_costs.size(); ++v)
      os << "V " << v << ' ' << fmt_double(w.vertex_costs[v]) << "\n";
    for (const auto& op : w.ops)
      os << op.op << ' ' << op.a << ' ' << op.b << "\n";
  }
  return os.str();
}

inline Workload parse_workload(std::string_view text) {
  Workload w;
  size_t line_no = 0;
  size_t pos = 0;
  bool have_header = false;
  uint32_t declared_sets = 0;

  auto next_line = [&](std::string_view& out) {
    if (pos >= text.size()) return false;
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    out = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    return true;
  };
  auto split = [](std::string_view s) {
    std::vector<std::string_view> toks;
    size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && s[i] == ' ') ++i;
      size_t j = i;
      while (j < s.size() && s[j] != ' ') ++j;
      if (j > i) toks.push_back(s.substr(i, j - i));
      i = j;
    }
    return toks;
  };
  auto to_u32 = [&](std::string_view t) {
    uint32_t v{};
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
      throw ParseError(line_no, "expected integer, got '" + std::string(t) + "'");
    return v;
  };
  auto to_f64 = [&](std::string_view t) {
    double v{};
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
      throw ParseError(line_no, "expected number, got '" + std::string(t) + "'");
    return v;
  };

  std::string_view line;
  while (next_line(line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!have_header && w.tag.empty() && line.size() > 2)
        w.tag = std::string(line.substr(2));
      continue;
    }
    auto toks = split(line);
    if (toks.empty()) continue;
    if (!have_header) {
      if (toks[0] == "SC") {
        if (toks.size() != 6) throw ParseError(line_no, "SC header needs 5 fields");
        w.kind = Workload::kSetCover;
        w.n = to_u32(toks[1]);
        declared_sets = to_u32(toks[2]);
        w.f_or_delta = to_u32(toks[3]);
        w.c_ratio = to_f64(toks[4]);
        w.eps_hint = to_f64(toks[5]);
        w.sets.resize(declared_sets);
      } else if (toks[0] == "DS") {
        if (toks.size() != 5) throw ParseError(line_no, "DS header needs 4 fields");
        w.kind = Workload::kDomSet;
        w.n = to_u32(toks[1]);
        w.f_or_delta = to_u32(toks[2]);
        w.c_ratio = to_f64(toks[3]);
        w.eps_hint = to_f64(toks[4]);
        w.vertex_costs.assign(w.n, 1.0);
      } else {
        throw ParseError(line_no, "expected SC or DS header");
      }
      have_header = true;
      continue;
    }
    if (toks[0] == "S") {
      if (w.kind != Workload::kSetCover) throw ParseError(line_no, "S line in DS file");
      if (toks.size() < 3) throw ParseError(line_no, "S line needs id and cost");
      const uint32_t id = to_u32(toks[1]);
      if (id >= declared_sets) throw ParseError(line_no, "set id out of range");
      w.sets[id].first = to_f64(toks[2]);
      for (size_t i = 3; i < toks.size(); ++i) {
        const uint32_t e = to_u32(toks[i]);
        if (e >= w.n) throw ParseError(line_no, "element id out of range");
        w.sets[id].second.push_back(e);
      }
    } else if (toks[0] == "V") {
      if (w.kind != Workload::kDomSet) throw ParseError(line_no, "V line in SC file");
      if (toks.size() != 3) throw ParseError(line_no, "V line needs id and cost");
      const uint32_t id = to_u32(toks[1]);
      if (id >= w.n) throw ParseError(line_no, "vertex id out of range");
      w.vertex_costs[id] = to_f64(toks[2]);
    } else if (toks[0] == "+" || toks[0] == "-") {
      Workload::Op op{};
      op.op = toks[0][0];
      if (w.kind == Workload::kSetCover) {
        if (toks.size() != 2) throw ParseError(line_no, "SC op needs one element");
        op.a = to_u32(toks[1]);
        if (op.a >= w.n) throw ParseError(line_no, "element id out of range");
      } else {
        if (toks.size() != 3) throw ParseError(line_no, "DS op needs two vertices");
        op.a = to_u32(toks[1]);
        op.b = to_u32(toks[2]);
        if (op.a >= w.n || op.b >= w.n)
          throw ParseError(line_no, "vertex id out of range");
      }
      w.ops.push_back(op);
    } else {
      throw ParseError(line_no, "unrecognized line '" + std::string(toks[0]) + "'");
    }
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  return w;
}

// --- metrics stream ----------------------------------------------------------

inline std::string format_step_record(const StepReport& r, bool ds) {
  std::ostringstream os;
  os << "step=" << r.step << " op=" << r.op << r.arg_a;
  if (ds) os << ':' << r.arg_b;
  os << " cost=" << fmt_double(r.cover_cost) << " sets=" << r.cover_sets
     << " active=" << r.active_items << " dlev=" << r.element_level_changes
     << " rec=" << r.recourse << " rises=" << r.rises
     << " skips=" << r.stale_pd_skips << " refreshed=" << r.refreshed_entries
     << " resets=" << r.resets.size();
  for (size_t i = 0; i < r.resets.size(); ++i) {
    const ResetInfo& x = r.resets[i];
    os << " reset" << i << '=' << (x.global ? "global" : "partial") << ':'
       << x.i_crit << ':' << x.u_size << ':' << x.f_size;
  }
  return os.str();
}

// In-order handoff of metrics lines to a writer thread; push blocks once the
// queue is full so the producer can never outrun the sink unboundedly.
class BoundedLineQueue {
 public:
  explicit BoundedLineQueue(size_t capacity) : cap_(capacity) {}

  void push(std::string line) {
    std::unique_lock<std::mutex> lk(mu_);
    not_full_.wait(lk, [&] { return q_.size() < cap_ || closed_; });
    if (closed_) throw std::logic_error("push after close");
    q_.push_back(std::move(line));
    not_empty_.notify_one();
  }

  bool pop(std::string& out) {
    std::unique_lock<std::mutex> lk(mu_);
    not_empty_.wait(lk, [&] { return !q_.empty() || closed_; });
    if (q_.empty()) return false;
    out = std::move(q_.front());
    q_.pop_front();
    not_full_.notify_one();
    return true;
  }

  void close() {
    std::lock_guard<std::mutex> lk(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  size_t cap_;
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<std::string> q_;
  bool closed_ = false;
};

class MetricsWriter {
 public:
  MetricsWriter(std::ostream& os, size_t capacity = 1024)
      : os_(os), queue_(capacity), worker_([this] { drain(); }) {}

  ~MetricsWriter() { finish(); }

  void push(std::string line) { queue_.push(std::move(line)); }

  void finish() {
    if (worker_.joinable()) {
      queue_.close();
      worker_.join();
    }
  }

 private:
  void drain() {
    std::string line;
    while (queue_.pop(line)) os_ << line << '\n';
    os_.flush();
  }

  std::ostream& os_;
  BoundedLineQueue queue_;
  std::thread worker_;
};

}  // namespace dsc
