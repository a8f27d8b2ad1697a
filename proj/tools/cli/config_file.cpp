#include "config_file.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nseg::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Drops a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

// "x" -> x, [1, 2, 3] -> 1,2,3, anything else verbatim.
std::string unwrap_value(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return std::string(v.substr(1, v.size() - 2));
  }
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') {
    std::string out;
    std::string_view body = v.substr(1, v.size() - 2);
    for (;;) {
      const auto pos = body.find(',');
      std::string item = unwrap_value(body.substr(0, pos));
      if (!item.empty()) out += (out.empty() ? "" : ",") + item;
      if (pos == std::string_view::npos) break;
      body.remove_prefix(pos + 1);
    }
    return out;
  }
  return std::string(v);
}

const std::set<std::string, std::less<>> kPlainSections = {"", "augment", "preview", "stats",
                                                           "tile", "general"};

}  // namespace

KeyValues parse_config(std::string_view text, std::string_view origin) {
  KeyValues out;
  std::string section;
  std::string omega_alpha;
  std::string omega_sigma;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;

  auto fail = [&](const std::string& what) {
    throw std::runtime_error(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kPlainSections.contains(section) && section != "omega" && section != "classes") {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    std::string key(trim(line.substr(0, eq)));
    std::string value = unwrap_value(line.substr(eq + 1));
    if (key.empty()) fail("empty key");

    if (section == "omega") {
      if (key == "alpha") omega_alpha = value;
      else if (key == "sigma") omega_sigma = value;
      else if (key == "product") out["omega"] = value;
      else fail("unknown [omega] key '" + key + "'");
    } else if (section == "classes") {
      if (key == "remap" || key == "classes" || key == "names") {
        out[key == "names" ? "class-names" : key] = value;
      } else {
        fail("unknown [classes] key '" + key + "'");
      }
    } else {
      out[key] = value;
    }
  }

  if (!omega_alpha.empty() || !omega_sigma.empty()) {
    if (omega_alpha.empty() || omega_sigma.empty()) {
      throw std::runtime_error(std::string(origin) +
                               ": [omega] needs both alpha and sigma lists");
    }
    out["omega"] = omega_alpha + "x" + omega_sigma;
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace nseg::cli
