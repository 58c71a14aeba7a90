#include "ludrec/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>

#include "ludrec/error.hpp"

namespace ludrec {

std::string FormatReal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

[[noreturn]] void Fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string_view> SplitWs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

double ParseReal(std::string_view tok, std::size_t line_no) {
  // strtod handles inf/nan spellings and is locale-independent for "C".
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) Fail(line_no, "bad real '" + s + "'");
  return v;
}

template <typename T>
T ParseUnsigned(std::string_view tok, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    Fail(line_no, "bad integer '" + std::string(tok) + "'");
  }
  return value;
}

std::string_view ValueOf(std::string_view tok, std::string_view key, std::size_t line_no) {
  if (tok.size() <= key.size() || tok.substr(0, key.size()) != key ||
      tok[key.size()] != '=') {
    Fail(line_no, "expected '" + std::string(key) + "=<value>'");
  }
  return tok.substr(key.size() + 1);
}

// Reads all lines; a non-empty stream whose last line is not LF-terminated
// is treated as truncated.
std::vector<std::string> ReadLines(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.empty()) throw Error(ErrorKind::kParse, "empty input");
  if (text.back() != '\n') throw Error(ErrorKind::kParse, "input is truncated (no final newline)");
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

struct Cursor {
  const std::vector<std::string>& lines;
  std::size_t next = 0;

  bool done() const { return next >= lines.size(); }
  std::size_t line_no() const { return next + 1; }
};

Instance ParseInstance(Cursor& cur) {
  while (!cur.done() && SplitWs(cur.lines[cur.next]).empty()) ++cur.next;
  if (cur.done()) throw Error(ErrorKind::kParse, "missing header line");
  const std::size_t header_line = cur.line_no();
  const auto header = SplitWs(cur.lines[cur.next++]);
  if (header.size() != 4) Fail(header_line, "header must be 'n=<n> p=<p> sigma=<s> seed=<seed>'");

  Instance inst;
  inst.params.n = ParseUnsigned<std::size_t>(ValueOf(header[0], "n", header_line), header_line);
  inst.params.p = ParseReal(ValueOf(header[1], "p", header_line), header_line);
  inst.params.noise_sigma = ParseReal(ValueOf(header[2], "sigma", header_line), header_line);
  inst.params.seed = ParseUnsigned<std::uint64_t>(ValueOf(header[3], "seed", header_line), header_line);
  const std::size_t n = inst.params.n;
  if (n < 2) Fail(header_line, "n must be at least 2");
  if (!(inst.params.p > 0.0 && inst.params.p <= 1.0)) Fail(header_line, "p must lie in (0, 1]");
  if (!(inst.params.noise_sigma >= 0.0 && inst.params.noise_sigma <= 1.0)) {
    Fail(header_line, "sigma must lie in [0, 1]");
  }
  inst.graph = ViewGraph(n);

  std::vector<Point3> vertices;
  std::vector<bool> seen(n, false);
  while (!cur.done()) {
    const std::size_t line_no = cur.line_no();
    const auto tok = SplitWs(cur.lines[cur.next]);
    if (tok.empty()) {
      ++cur.next;
      continue;
    }
    if (tok[0] == "V") {
      if (inst.graph.num_edges() > 0) Fail(line_no, "vertex record after edge records");
      if (tok.size() != 5) Fail(line_no, "vertex record needs 4 fields");
      const auto i = ParseUnsigned<std::size_t>(tok[1], line_no);
      if (i >= n) Fail(line_no, "vertex index out of range");
      if (seen[i]) Fail(line_no, "duplicate vertex record");
      if (i != vertices.size()) Fail(line_no, "vertex records must be in index order");
      seen[i] = true;
      vertices.emplace_back(ParseReal(tok[2], line_no), ParseReal(tok[3], line_no),
                            ParseReal(tok[4], line_no));
    } else if (tok[0] == "E") {
      if (tok.size() != 7) Fail(line_no, "edge record needs 6 fields");
      const auto i = ParseUnsigned<std::size_t>(tok[1], line_no);
      const auto j = ParseUnsigned<std::size_t>(tok[2], line_no);
      const Point3 g(ParseReal(tok[3], line_no), ParseReal(tok[4], line_no),
                     ParseReal(tok[5], line_no));
      EdgeLabel label;
      if (tok[6] == "G") {
        label = EdgeLabel::kGood;
      } else if (tok[6] == "B") {
        label = EdgeLabel::kBad;
      } else {
        Fail(line_no, "edge label must be G or B");
      }
      try {
        inst.graph.AddEdge(i, j, UnitVector3::FromUnit(g), label);
      } catch (const Error& e) {
        Fail(line_no, e.what());
      }
    } else {
      break;  // start of a result block or foreign record
    }
    ++cur.next;
  }
  if (!vertices.empty()) {
    if (vertices.size() != n) {
      Fail(header_line, "expected " + std::to_string(n) + " vertex records, found " +
                            std::to_string(vertices.size()));
    }
    inst.ground_truth = LocationSet(std::move(vertices));
  }
  return inst;
}

}  // namespace

void WriteInstance(std::ostream& out, const Instance& instance) {
  const auto& g = instance.graph;
  out << "n=" << g.num_vertices() << " p=" << FormatReal(instance.params.p)
      << " sigma=" << FormatReal(instance.params.noise_sigma) << " seed=" << instance.params.seed
      << '\n';
  if (instance.ground_truth) {
    const auto& gt = *instance.ground_truth;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      out << "V " << i << ' ' << FormatReal(gt[i].x()) << ' ' << FormatReal(gt[i].y()) << ' '
          << FormatReal(gt[i].z()) << '\n';
    }
  }
  for (const auto& e : g.edges()) {
    out << "E " << e.i << ' ' << e.j << ' ' << FormatReal(e.direction.x()) << ' '
        << FormatReal(e.direction.y()) << ' ' << FormatReal(e.direction.z()) << ' '
        << (e.good() ? 'G' : 'B') << '\n';
  }
}

std::string InstanceToString(const Instance& instance) {
  std::ostringstream out;
  WriteInstance(out, instance);
  return out.str();
}

Instance ReadInstance(std::istream& in) {
  const auto lines = ReadLines(in);
  Cursor cur{lines};
  Instance inst = ParseInstance(cur);
  while (!cur.done() && SplitWs(lines[cur.next]).empty()) ++cur.next;
  if (!cur.done()) Fail(cur.line_no(), "unexpected record");
  return inst;
}

Instance ReadInstanceFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot open '" + path + "'");
  return ReadInstance(in);
}

void WriteInstanceFile(const std::string& path, const Instance& instance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kPrecondition, "cannot write '" + path + "'");
  WriteInstance(out, instance);
}

void WriteResultBlock(std::ostream& out, const ViewGraph& graph, const ResultBlock& block) {
  const SolverResult& r = block.result;
  out << "METHOD " << ToString(block.method) << '\n';
  for (std::size_t i = 0; i < r.locations.size(); ++i) {
    const Point3& p = r.locations[i];
    out << "R " << i << ' ' << FormatReal(p.x()) << ' ' << FormatReal(p.y()) << ' '
        << FormatReal(p.z()) << '\n';
  }
  for (std::size_t e = 0; e < r.alphas.size(); ++e) {
    const Edge& edge = graph.edge(e);
    out << "A " << edge.i << ' ' << edge.j << ' ' << FormatReal(r.alphas[e]) << '\n';
  }
  out << "OBJ " << FormatReal(r.objective) << " ITERS " << r.iterations << " STATUS "
      << ToString(r.status) << '\n';
}

ResultFile ReadResultFile(std::istream& in) {
  const auto lines = ReadLines(in);
  Cursor cur{lines};
  ResultFile file;
  file.instance = ParseInstance(cur);
  const ViewGraph& graph = file.instance.graph;
  const std::size_t n = graph.num_vertices();

  while (!cur.done()) {
    auto tok = SplitWs(lines[cur.next]);
    if (tok.empty()) {
      ++cur.next;
      continue;
    }
    const std::size_t block_line = cur.line_no();
    if (tok[0] != "METHOD" || tok.size() != 2) Fail(block_line, "expected 'METHOD <name>'");
    ResultBlock block;
    try {
      block.method = ParseMethod(tok[1]);
    } catch (const Error& e) {
      Fail(block_line, e.what());
    }
    ++cur.next;
    std::vector<Point3> pts;
    bool closed = false;
    while (!cur.done()) {
      const std::size_t line_no = cur.line_no();
      tok = SplitWs(lines[cur.next++]);
      if (tok.empty()) continue;
      if (tok[0] == "R") {
        if (tok.size() != 5) Fail(line_no, "result record needs 4 fields");
        if (ParseUnsigned<std::size_t>(tok[1], line_no) != pts.size()) {
          Fail(line_no, "result records must be in index order");
        }
        pts.emplace_back(ParseReal(tok[2], line_no), ParseReal(tok[3], line_no),
                         ParseReal(tok[4], line_no));
      } else if (tok[0] == "A") {
        if (tok.size() != 4) Fail(line_no, "alpha record needs 3 fields");
        const auto i = ParseUnsigned<std::size_t>(tok[1], line_no);
        const auto j = ParseUnsigned<std::size_t>(tok[2], line_no);
        const std::size_t e = block.result.alphas.size();
        if (e >= graph.num_edges() || graph.edge(e).i != i || graph.edge(e).j != j) {
          Fail(line_no, "alpha records must follow the edge order");
        }
        block.result.alphas.push_back(ParseReal(tok[3], line_no));
      } else if (tok[0] == "OBJ") {
        if (tok.size() != 6 || tok[2] != "ITERS" || tok[4] != "STATUS") {
          Fail(line_no, "trailer must be 'OBJ <v> ITERS <k> STATUS <s>'");
        }
        block.result.objective = ParseReal(tok[1], line_no);
        block.result.iterations = ParseUnsigned<std::size_t>(tok[3], line_no);
        try {
          block.result.status = ParseStatus(tok[5]);
        } catch (const Error& e) {
          Fail(line_no, e.what());
        }
        closed = true;
        break;
      } else {
        Fail(line_no, "unexpected record in result block");
      }
    }
    if (!closed) Fail(block_line, "result block has no OBJ trailer");
    if (pts.size() != n) Fail(block_line, "result block needs " + std::to_string(n) + " R records");
    if (!block.result.alphas.empty() && block.result.alphas.size() != graph.num_edges()) {
      Fail(block_line, "alpha records do not cover every edge");
    }
    block.result.locations = LocationSet(std::move(pts));
    file.blocks.push_back(std::move(block));
  }
  return file;
}

ResultFile ReadResultFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot open '" + path + "'");
  return ReadResultFile(in);
}

}  // namespace ludrec
