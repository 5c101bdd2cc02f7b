#include "config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "llmc/expr.hpp"
#include "llmc/io.hpp"

namespace llmc::cli {

ConfigError::ConfigError(std::size_t line, std::size_t column, const std::string& message)
    : Error("config:" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

struct Value {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
  bool quoted = false;
};

using Section = std::map<std::string, Value>;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, Section> tokenize(std::string_view text) {
  static const std::set<std::string> kSections{"target", "jump_measure", "sim", "output",
                                               "diagnostics"};
  std::map<std::string, Section> out;
  std::string current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    // Strip comments that are not inside a quoted value.
    std::string_view line = raw;
    bool in_quote = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') in_quote = !in_quote;
      if (!in_quote && (raw[i] == '#' || raw[i] == ';')) {
        line = raw.substr(0, i);
        break;
      }
    }
    const auto body = trim(line);
    if (body.empty()) continue;
    const std::size_t indent = static_cast<std::size_t>(body.data() - raw.data());

    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(line_no, indent + 1, "unterminated section header");
      current = std::string(trim(body.substr(1, body.size() - 2)));
      if (!kSections.count(current)) {
        throw ConfigError(line_no, indent + 2, "unknown section [" + current + "]");
      }
      out[current];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, indent + 1, "expected key = value");
    if (current.empty()) throw ConfigError(line_no, indent + 1, "key outside of any section");
    const std::string key(trim(body.substr(0, eq)));
    if (key.empty()) throw ConfigError(line_no, indent + 1, "empty key");
    std::string_view rest = body.substr(eq + 1);
    const auto value_start = rest.find_first_not_of(" \t");
    Value v;
    v.line = line_no;
    v.column = indent + eq + 2 + (value_start == std::string_view::npos ? 0 : value_start);
    rest = trim(rest);
    if (!rest.empty() && rest.front() == '"') {
      const auto close = rest.find('"', 1);
      if (close == std::string_view::npos) throw ConfigError(line_no, v.column, "unterminated string");
      if (!trim(rest.substr(close + 1)).empty()) {
        throw ConfigError(line_no, v.column + close + 1, "unexpected text after string");
      }
      v.text = std::string(rest.substr(1, close - 1));
      v.quoted = true;
    } else {
      v.text = std::string(rest);
    }
    auto& section = out[current];
    if (section.count(key)) throw ConfigError(line_no, indent + 1, "duplicate key '" + key + "'");
    section[key] = std::move(v);
  }
  return out;
}

double to_double(const Value& v) {
  const auto s = trim(v.text);
  double d = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), d);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(v.line, v.column, "expected a number, got '" + v.text + "'");
  }
  return d;
}

template <class Int>
Int to_integer(const Value& v) {
  const auto s = trim(v.text);
  Int i = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), i);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(v.line, v.column, "expected a non-negative integer, got '" + v.text + "'");
  }
  return i;
}

std::vector<double> to_list(const Value& v) {
  std::vector<double> out;
  std::size_t start = 0;
  const std::string& s = v.text;
  if (trim(s).empty()) return out;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    Value item{s.substr(start, comma - start), v.line, v.column + start, false};
    out.push_back(to_double(item));
    start = comma + 1;
  }
  return out;
}

double positive(const Value& v, const char* what) {
  const double d = to_double(v);
  if (!(d > 0.0)) throw ConfigError(v.line, v.column, std::string(what) + " must be positive");
  return d;
}

class Reader {
 public:
  Reader(const std::map<std::string, Section>& sections, std::string name)
      : name_(std::move(name)) {
    const auto it = sections.find(name_);
    if (it != sections.end()) section_ = &it->second;
  }

  bool present() const { return section_ != nullptr; }

  const Value* get(const std::string& key) {
    if (!section_) return nullptr;
    const auto it = section_->find(key);
    if (it == section_->end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  void finish() const {
    if (!section_) return;
    for (const auto& [key, v] : *section_) {
      if (!used_.count(key)) {
        throw ConfigError(v.line, 1, "unknown key '" + key + "' in [" + name_ + "]");
      }
    }
  }

 private:
  std::string name_;
  const Section* section_ = nullptr;
  std::set<std::string> used_;
};

// Parses eagerly so expression errors carry a file location.
std::string expression(const Value& v) {
  try {
    dsl::parse(v.text);
  } catch (const dsl::SyntaxError& e) {
    throw ConfigError(v.line, v.column + e.offset() + (v.quoted ? 1 : 0), e.message());
  }
  return v.text;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  const auto sections = tokenize(text);
  RunConfig cfg;

  Reader target(sections, "target");
  const Value* density = target.get("density");
  if (!density || trim(density->text).empty()) {
    throw ConfigError(density ? density->line : 1, density ? density->column : 1,
                      "missing target density expression ([target] density)");
  }
  cfg.problem.target.density = expression(*density);
  if (const auto* v = target.get("breakpoints")) cfg.problem.target.breakpoints = to_list(*v);
  if (const auto* v = target.get("cutoff")) cfg.problem.target.cutoff = positive(*v, "cutoff");
  if (const auto* v = target.get("tail_rate")) cfg.problem.target.tail_rate = positive(*v, "tail_rate");
  target.finish();

  Reader jm(sections, "jump_measure");
  if (!jm.present()) throw ConfigError(1, 1, "missing [jump_measure] section");
  std::vector<double> locations;
  std::vector<double> masses;
  const Value* loc_v = jm.get("atom_locations");
  const Value* mass_v = jm.get("atom_masses");
  if (loc_v) locations = to_list(*loc_v);
  if (mass_v) masses = to_list(*mass_v);
  if (locations.size() != masses.size()) {
    const Value* at = mass_v ? mass_v : loc_v;
    throw ConfigError(at->line, at->column, "atom_locations and atom_masses differ in length");
  }
  for (std::size_t i = 0; i < locations.size(); ++i) {
    cfg.problem.measure.atoms.push_back({locations[i], masses[i]});
  }
  if (const auto* v = jm.get("density")) {
    JumpDensitySpec d;
    d.density = expression(*v);
    if (const auto* t = jm.get("density_tail")) d.tail = expression(*t);
    if (const auto* s = jm.get("density_support")) {
      const auto range = to_list(*s);
      if (range.size() != 2 || !(range[1] > range[0])) {
        throw ConfigError(s->line, s->column, "density_support must be 'lower, upper' with lower < upper");
      }
      d.support_lower = range[0];
      d.support_upper = range[1];
    }
    if (const auto* b = jm.get("density_breakpoints")) d.breakpoints = to_list(*b);
    cfg.problem.measure.density = std::move(d);
  } else {
    for (const char* key : {"density_tail", "density_support", "density_breakpoints"}) {
      if (const auto* v = jm.get(key)) {
        throw ConfigError(v->line, v->column, std::string(key) + " given without density");
      }
    }
  }
  if (cfg.problem.measure.atoms.empty() && !cfg.problem.measure.density) {
    throw ConfigError(1, 1, "jump measure has neither atoms nor a density");
  }
  jm.finish();

  Reader sim(sections, "sim");
  auto& s = cfg.sim;
  s.seed = 1;
  if (const auto* v = sim.get("x0")) s.x0 = positive(*v, "x0");
  if (const auto* v = sim.get("t_end")) s.t_end = positive(*v, "t_end");
  if (const auto* v = sim.get("dt_max")) s.dt_max = positive(*v, "dt_max");
  if (const auto* v = sim.get("burn_in")) {
    s.burn_in = to_double(*v);
    if (!(s.burn_in >= 0.0)) throw ConfigError(v->line, v->column, "burn_in must be non-negative");
  }
  if (const auto* v = sim.get("skeleton_delta")) s.skeleton_delta = positive(*v, "skeleton_delta");
  if (const auto* v = sim.get("record")) {
    if (v->text == "full") {
      s.record = RecordMode::Full;
    } else if (v->text == "skeleton") {
      s.record = RecordMode::Skeleton;
    } else if (v->text == "endpoint") {
      s.record = RecordMode::Endpoint;
    } else {
      throw ConfigError(v->line, v->column, "record must be full, skeleton or endpoint");
    }
  }
  if (const auto* v = sim.get("samples")) {
    cfg.samples = to_integer<std::size_t>(*v);
    if (cfg.samples == 0) throw ConfigError(v->line, v->column, "samples must be at least 1");
  }
  if (const auto* v = sim.get("chains")) {
    s.chains = to_integer<unsigned>(*v);
    if (s.chains == 0) throw ConfigError(v->line, v->column, "chains must be at least 1");
  }
  if (const auto* v = sim.get("threads")) s.threads = to_integer<unsigned>(*v);
  if (const auto* v = sim.get("seed")) s.seed = to_integer<std::uint64_t>(*v);
  if (const auto* v = sim.get("table_points")) {
    cfg.table_points = to_integer<std::size_t>(*v);
    if (cfg.table_points < 64) throw ConfigError(v->line, v->column, "table_points must be at least 64");
  }
  if (s.dt_max > s.skeleton_delta) {
    throw ConfigError(1, 1, "dt_max must not exceed skeleton_delta");
  }
  sim.finish();

  Reader out(sections, "output");
  if (const auto* v = out.get("directory")) cfg.output_dir = v->text;
  if (const auto* v = out.get("bins")) {
    cfg.bins = to_integer<std::size_t>(*v);
    if (cfg.bins < 2) throw ConfigError(v->line, v->column, "bins must be at least 2");
  }
  out.finish();

  Reader diag(sections, "diagnostics");
  if (const auto* v = diag.get("truncation_n")) {
    cfg.truncation_n.clear();
    for (double d : to_list(*v)) {
      if (!(d >= 1.0) || d != static_cast<double>(static_cast<unsigned>(d))) {
        throw ConfigError(v->line, v->column, "truncation_n entries must be positive integers");
      }
      cfg.truncation_n.push_back(static_cast<unsigned>(d));
    }
  }
  if (const auto* v = diag.get("truncation_grid")) {
    const auto g = to_list(*v);
    if (g.size() != 3 || !(g[0] > 0.0) || !(g[1] > g[0]) || !(g[2] >= 2.0)) {
      throw ConfigError(v->line, v->column, "truncation_grid must be 'lo, hi, points' with 0 < lo < hi");
    }
    cfg.truncation_grid = {g[0], g[1], static_cast<std::size_t>(g[2])};
  }
  diag.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, 0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

std::string to_config_text(const RunConfig& cfg) {
  std::ostringstream os;
  const auto& t = cfg.problem.target;
  os << "[target]\n";
  os << "density = \"" << t.density << "\"\n";
  if (!t.breakpoints.empty()) os << "breakpoints = " << list(t.breakpoints) << '\n';
  if (t.cutoff) os << "cutoff = " << format_number(*t.cutoff) << '\n';
  if (t.tail_rate) os << "tail_rate = " << format_number(*t.tail_rate) << '\n';

  const auto& m = cfg.problem.measure;
  os << "\n[jump_measure]\n";
  if (!m.atoms.empty()) {
    std::vector<double> loc;
    std::vector<double> mass;
    for (const auto& a : m.atoms) {
      loc.push_back(a.location);
      mass.push_back(a.mass);
    }
    os << "atom_locations = " << list(loc) << '\n';
    os << "atom_masses = " << list(mass) << '\n';
  }
  if (m.density) {
    os << "density = \"" << m.density->density << "\"\n";
    if (!m.density->tail.empty()) os << "density_tail = \"" << m.density->tail << "\"\n";
    os << "density_support = " << format_number(m.density->support_lower) << ", "
       << format_number(m.density->support_upper) << '\n';
    if (!m.density->breakpoints.empty()) {
      os << "density_breakpoints = " << list(m.density->breakpoints) << '\n';
    }
  }

  const auto& s = cfg.sim;
  os << "\n[sim]\n";
  os << "x0 = " << format_number(s.x0) << '\n';
  os << "t_end = " << format_number(s.t_end) << '\n';
  os << "dt_max = " << format_number(s.dt_max) << '\n';
  os << "burn_in = " << format_number(s.burn_in) << '\n';
  os << "skeleton_delta = " << format_number(s.skeleton_delta) << '\n';
  os << "record = "
     << (s.record == RecordMode::Full ? "full"
                                      : s.record == RecordMode::Skeleton ? "skeleton" : "endpoint")
     << '\n';
  os << "samples = " << cfg.samples << '\n';
  os << "chains = " << s.chains << '\n';
  os << "threads = " << s.threads << '\n';
  os << "seed = " << s.seed << '\n';
  os << "table_points = " << cfg.table_points << '\n';

  os << "\n[output]\n";
  if (!cfg.output_dir.empty()) os << "directory = \"" << cfg.output_dir << "\"\n";
  os << "bins = " << cfg.bins << '\n';

  os << "\n[diagnostics]\n";
  std::vector<double> ns(cfg.truncation_n.begin(), cfg.truncation_n.end());
  os << "truncation_n = " << list(ns) << '\n';
  const auto& g = cfg.truncation_grid;
  if (g.hi) {
    os << "truncation_grid = " << format_number(g.lo) << ", " << format_number(*g.hi) << ", "
       << g.points << '\n';
  }
  return os.str();
}

}  // namespace llmc::cli
