#include "diploid/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace diploid {

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

bool OutputConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

// Thrown by field setters; the caller prefixes the location.
struct FieldError {
  std::string message;
};

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw FieldError{"expected a finite number, got '" + text + "'"};
  }
  return value;
}

std::int64_t parse_int(const std::string& text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw FieldError{"expected an integer, got '" + text + "'"};
  return value;
}

std::uint64_t parse_unsigned(const std::string& text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FieldError{"expected a nonnegative integer, got '" + text + "'"};
  }
  return value;
}

bool parse_bool(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "yes" || lower == "1") return true;
  if (lower == "false" || lower == "no" || lower == "0") return false;
  throw FieldError{"expected true or false, got '" + text + "'"};
}

double positive(double v, const char* what) {
  if (!(v > 0.0)) throw FieldError{std::string(what) + " must be positive"};
  return v;
}

double nonnegative(double v, const char* what) {
  if (!(v >= 0.0)) throw FieldError{std::string(what) + " must be nonnegative"};
  return v;
}

std::string one_of(const std::string& v, std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += list.empty() ? a : std::string(", ") + a;
  }
  throw FieldError{"expected one of " + list + ", got '" + v + "'"};
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Section = std::vector<std::pair<std::string, Field>>;

// Sections and keys in canonical emission order.
const std::vector<std::pair<std::string, Section>>& schema() {
  static const std::vector<std::pair<std::string, Section>> table = [] {
    std::vector<std::pair<std::string, Section>> t;

    Section model;
    for (int i = 0; i < 3; ++i) {
      model.push_back({"beta" + std::to_string(i + 1),
                       {[i](RunConfig& c, const std::string& v) {
                          c.model.beta[i] = nonnegative(parse_double(v), "beta");
                        },
                        [i](const RunConfig& c) { return format_number(c.model.beta[i]); }}});
    }
    for (int i = 0; i < 3; ++i) {
      model.push_back({"delta" + std::to_string(i + 1),
                       {[i](RunConfig& c, const std::string& v) {
                          c.model.delta[i] = nonnegative(parse_double(v), "delta");
                        },
                        [i](const RunConfig& c) { return format_number(c.model.delta[i]); }}});
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        model.push_back({"alpha" + std::to_string(i + 1) + std::to_string(j + 1),
                         {[i, j](RunConfig& c, const std::string& v) {
                            c.model.alpha[i][j] = parse_double(v);
                          },
                          [i, j](const RunConfig& c) {
                            return format_number(c.model.alpha[i][j]);
                          }}});
      }
    }
    model.push_back({"gamma",
                     {[](RunConfig& c, const std::string& v) {
                        c.model.gamma = positive(parse_double(v), "gamma");
                      },
                      [](const RunConfig& c) { return format_number(c.model.gamma); }}});
    t.emplace_back("model", std::move(model));

    auto real = [](double SchemeConfig::*member, bool strictly_positive, const char* name) {
      return Field{[=](RunConfig& c, const std::string& v) {
                     const double x = parse_double(v);
                     c.scheme.*member = strictly_positive ? positive(x, name) : nonnegative(x, name);
                   },
                   [=](const RunConfig& c) { return format_number(c.scheme.*member); }};
    };
    Section scheme{
        {"dt", real(&SchemeConfig::dt, true, "dt")},
        {"eps_n", real(&SchemeConfig::eps_n, false, "eps_n")},
        {"eps_x", real(&SchemeConfig::eps_x, false, "eps_x")},
        {"t_end", real(&SchemeConfig::t_end, false, "t_end")},
        {"seed",
         {[](RunConfig& c, const std::string& v) { c.scheme.seed = parse_unsigned(v); },
          [](const RunConfig& c) { return std::to_string(c.scheme.seed); }}},
        {"threads",
         {[](RunConfig& c, const std::string& v) {
            c.scheme.threads = parse_unsigned(v);
            if (c.scheme.threads == 0) throw FieldError{"threads must be at least 1"};
          },
          [](const RunConfig& c) { return std::to_string(c.scheme.threads); }}},
    };
    t.emplace_back("scheme", std::move(scheme));

    auto count = [](std::uint64_t ExperimentConfig::*member, std::uint64_t minimum) {
      return Field{[=](RunConfig& c, const std::string& v) {
                     const auto x = parse_unsigned(v);
                     if (x < minimum) {
                       throw FieldError{"must be at least " + std::to_string(minimum)};
                     }
                     c.experiment.*member = x;
                   },
                   [=](const RunConfig& c) { return std::to_string(c.experiment.*member); }};
    };
    auto measure = [](double ExperimentConfig::*member, const char* name) {
      return Field{[=](RunConfig& c, const std::string& v) {
                     c.experiment.*member = positive(parse_double(v), name);
                   },
                   [=](const RunConfig& c) { return format_number(c.experiment.*member); }};
    };
    auto mass = [](double GenotypeState::*member) {
      return Field{[=](RunConfig& c, const std::string& v) {
                     c.experiment.z0.*member = nonnegative(parse_double(v), "genotype mass");
                   },
                   [=](const RunConfig& c) { return format_number(c.experiment.z0.*member); }};
    };
    Section experiment{
        {"K",
         {[](RunConfig& c, const std::string& v) {
            c.experiment.K = parse_int(v);
            if (c.experiment.K <= 0) throw FieldError{"K must be a positive integer"};
          },
          [](const RunConfig& c) { return std::to_string(c.experiment.K); }}},
        {"K_list",
         {[](RunConfig& c, const std::string& v) {
            std::vector<std::int64_t> list;
            for (const auto& item : split_list(v)) {
              list.push_back(parse_int(item));
              if (list.back() <= 0) throw FieldError{"every K must be a positive integer"};
              if (list.size() > 1 && list.back() <= list[list.size() - 2]) {
                throw FieldError{"K_list must be increasing"};
              }
            }
            if (list.empty()) throw FieldError{"K_list is empty"};
            c.experiment.K_list = std::move(list);
          },
          [](const RunConfig& c) {
            std::string out;
            for (auto k : c.experiment.K_list) out += (out.empty() ? "" : ", ") + std::to_string(k);
            return out;
          }}},
        {"z1", mass(&GenotypeState::z1)},
        {"z2", mass(&GenotypeState::z2)},
        {"z3", mass(&GenotypeState::z3)},
        {"replicates", count(&ExperimentConfig::replicates, 2)},
        {"order",
         {[](RunConfig& c, const std::string& v) {
            c.experiment.order = parse_int(v);
            if (c.experiment.order < 1) throw FieldError{"order must be at least 1"};
          },
          [](const RunConfig& c) { return std::to_string(c.experiment.order); }}},
        {"n0", measure(&ExperimentConfig::n0, "n0")},
        {"x0",
         {[](RunConfig& c, const std::string& v) {
            const double x = parse_double(v);
            if (!(x >= 0.0 && x <= 1.0)) throw FieldError{"x0 must lie in [0, 1]"};
            c.experiment.x0 = x;
          },
          [](const RunConfig& c) { return format_number(c.experiment.x0); }}},
        {"kind",
         {[](RunConfig& c, const std::string& v) {
            c.experiment.kind = one_of(v, {"na", "nx", "s", "haploid"});
          },
          [](const RunConfig& c) { return c.experiment.kind; }}},
        {"stop_at_fixation",
         {[](RunConfig& c, const std::string& v) { c.experiment.stop_at_fixation = parse_bool(v); },
          [](const RunConfig& c) {
            return std::string(c.experiment.stop_at_fixation ? "true" : "false");
          }}},
        {"particles", count(&ExperimentConfig::particles, 2)},
        {"snapshot_every", measure(&ExperimentConfig::snapshot_every, "snapshot_every")},
        {"record_every", count(&ExperimentConfig::record_every, 1)},
        {"record",
         {[](RunConfig& c, const std::string& v) {
            c.experiment.record = one_of(v, {"events", "grid", "final"});
          },
          [](const RunConfig& c) { return c.experiment.record; }}},
        {"grid_step", measure(&ExperimentConfig::grid_step, "grid_step")},
        {"scaling",
         {[](RunConfig& c, const std::string& v) {
            c.experiment.scaling = one_of(v, {"slow-fast", "logistic"});
          },
          [](const RunConfig& c) { return c.experiment.scaling; }}},
        {"samples", count(&ExperimentConfig::samples, 1)},
        {"window", measure(&ExperimentConfig::window, "window")},
    };
    t.emplace_back("experiment", std::move(experiment));

    Section output{
        {"directory",
         {[](RunConfig& c, const std::string& v) {
            if (v.empty()) throw FieldError{"directory must not be empty"};
            c.output.directory = v;
          },
          [](const RunConfig& c) { return c.output.directory; }}},
        {"formats",
         {[](RunConfig& c, const std::string& v) {
            std::vector<std::string> list;
            for (const auto& item : split_list(v)) list.push_back(one_of(item, {"csv", "svg"}));
            c.output.formats = std::move(list);
          },
          [](const RunConfig& c) {
            std::string out;
            for (const auto& f : c.output.formats) out += (out.empty() ? "" : ", ") + f;
            return out;
          }}},
    };
    t.emplace_back("output", std::move(output));
    return t;
  }();
  return table;
}

const Section* find_section(const std::string& name) {
  for (const auto& [section_name, section] : schema()) {
    if (section_name == name) return &section;
  }
  return nullptr;
}

const Field* find_field(const Section& section, const std::string& key) {
  for (const auto& [name, field] : section) {
    if (name == key) return &field;
  }
  return nullptr;
}

}  // namespace

ParsedConfig parse_config(const std::string& text) {
  ParsedConfig parsed;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  std::string section_name;
  const Section* section = nullptr;
  bool saw_model = false;
  std::map<std::string, int> seen;

  auto fail = [&](const std::string& message) {
    throw ValidationError("line " + std::to_string(line_number) + ": " + message);
  };

  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section_name = trim(line.substr(1, line.size() - 2));
      section = find_section(section_name);
      if (!section) {
        fail("unknown section [" + section_name + "] (expected model, scheme, experiment or output)");
      }
      if (seen.count("[" + section_name + "]")) fail("duplicate section [" + section_name + "]");
      seen["[" + section_name + "]"] = line_number;
      if (section_name == "model") saw_model = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section) fail("key '" + key + "' appears before any section header");
    const Field* field = find_field(*section, key);
    if (!field) fail("unknown key '" + key + "' in [" + section_name + "]");
    const std::string full = section_name + "." + key;
    if (seen.count(full)) {
      fail("duplicate key '" + key + "' (first set on line " + std::to_string(seen[full]) + ")");
    }
    seen[full] = line_number;
    if (value.empty()) fail("missing value for '" + key + "'");
    try {
      field->set(parsed.config, value);
    } catch (const FieldError& e) {
      fail("invalid value for '" + key + "': " + e.message);
    }
  }

  if (!saw_model) throw ValidationError("missing required [model] section");
  parsed.config.model.validate();
  parsed.h1 = validate_h1(parsed.config.model.alpha);
  if (!parsed.h1.satisfied) {
    parsed.warnings.push_back("warning: " + parsed.h1.describe() +
                              "; moment bounds and almost-sure extinction are not guaranteed");
  }
  return parsed;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string emit_config(const RunConfig& config) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section_name, section] : schema()) {
    if (!first) out << '\n';
    first = false;
    out << '[' << section_name << "]\n";
    for (const auto& [key, field] : section) out << key << " = " << field.get(config) << '\n';
  }
  return out.str();
}

void apply_override(RunConfig& config, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) {
    throw ValidationError("override '" + dotted_key + "' must have the form section.key");
  }
  const std::string section_name = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  const Section* section = find_section(section_name);
  if (!section) throw ValidationError("override: unknown section '" + section_name + "'");
  const Field* field = find_field(*section, key);
  if (!field) throw ValidationError("override: unknown key '" + key + "' in [" + section_name + "]");
  try {
    field->set(config, trim(value));
  } catch (const FieldError& e) {
    throw ValidationError("override " + dotted_key + ": " + e.message);
  }
}

std::vector<std::string> config_keys(const std::string& section_name) {
  const Section* section = find_section(section_name);
  if (!section) throw ValidationError("unknown section '" + section_name + "'");
  std::vector<std::string> keys;
  for (const auto& entry : *section) keys.push_back(entry.first);
  return keys;
}

void apply_assignment(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ValidationError("override '" + assignment + "' must have the form section.key=value");
  }
  apply_override(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

}  // namespace diploid
