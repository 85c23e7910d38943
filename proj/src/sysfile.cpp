#include "flatnf/sysfile.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "flatnf/errors.hpp"
#include "flatnf/parse.hpp"

namespace flatnf {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool valid_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

Rat parse_rational(const std::string& text, int line) {
  try {
    Expr e = parse_expr(text, {});
    if (!e.is_constant()) throw FileFormatError("'" + text + "' is not a rational constant", line);
    return e.constant_value();
  } catch (const SyntaxError&) {
    throw FileFormatError("'" + text + "' is not a rational constant", line);
  } catch (const UndeclaredIdentifier&) {
    throw FileFormatError("'" + text + "' is not a rational constant", line);
  }
}

void check_declared_name(const std::string& name, int line) {
  if (!valid_identifier(name))
    throw FileFormatError("'" + name + "' is not a valid identifier", line);
  if (is_reserved_name(name))
    throw FileFormatError("'" + name + "' is reserved (shifted-state and output forms)", line);
}

DiscreteSystem parse_system_json(const std::string& text, const std::string& fallback_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FileFormatError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!j.is_object()) throw FileFormatError("top-level JSON value must be an object", 0);

  std::string name = fallback_name;
  if (j.contains("system")) name = j.at("system").get<std::string>();
  if (j.contains("name")) name = j.at("name").get<std::string>();

  auto read_vars = [&](const char* key, bool input) {
    VarList out;
    if (!j.contains(key) || !j.at(key).is_array())
      throw FileFormatError(std::string("missing array field '") + key + "'", 0);
    for (const auto& item : j.at(key)) {
      if (!item.is_string()) throw FileFormatError(std::string(key) + " entries must be strings", 0);
      std::string n = item.get<std::string>();
      check_declared_name(n, 0);
      out.push_back(input ? Var::input(n) : Var::state(n));
    }
    return out;
  };
  VarList states = read_vars("states", false);
  VarList inputs = read_vars("inputs", true);

  SymbolTable symbols;
  for (const Var& v : states) symbols[v.display()] = v;
  for (const Var& v : inputs) symbols[v.display()] = v;

  if (!j.contains("updates") || !j.at("updates").is_object())
    throw FileFormatError("missing object field 'updates'", 0);
  std::map<Var, Expr> f;
  for (const auto& [key, val] : j.at("updates").items()) {
    auto it = symbols.find(key);
    if (it == symbols.end() || it->second.kind() != VarKind::State)
      throw FileFormatError("update key '" + key + "' is not a declared state", 0);
    if (!val.is_string()) throw FileFormatError("update for '" + key + "' must be a string", 0);
    if (f.count(it->second)) throw FileFormatError("duplicate update for " + key, 0);
    f[it->second] = parse_expr(val.get<std::string>(), symbols);
  }

  std::map<Var, Rat> eq;
  if (j.contains("equilibrium")) {
    if (!j.at("equilibrium").is_object())
      throw FileFormatError("'equilibrium' must be an object", 0);
    for (const auto& [key, val] : j.at("equilibrium").items()) {
      auto it = symbols.find(key);
      if (it == symbols.end())
        throw FileFormatError("equilibrium key '" + key + "' is not declared", 0);
      if (val.is_number_integer())
        eq[it->second] = Rat(val.get<long>());
      else if (val.is_string())
        eq[it->second] = parse_rational(val.get<std::string>(), 0);
      else
        throw FileFormatError("equilibrium values must be integers or rational strings", 0);
    }
  }
  return DiscreteSystem(name, states, inputs, f, eq);
}

}  // namespace

DiscreteSystem parse_system_text(const std::string& text, const std::string& fallback_name) {
  {
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
      return parse_system_json(text, fallback_name);
  }

  std::string name = fallback_name;
  VarList states, inputs;
  bool declared = false;
  SymbolTable symbols;
  std::map<Var, Expr> f;
  std::map<Var, int> update_lines;
  std::map<Var, Rat> eq;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.rfind("system", 0) == 0 && line.size() > 6 &&
        std::isspace(static_cast<unsigned char>(line[6]))) {
      name = trim(line.substr(6));
      if (name.empty()) throw FileFormatError("empty system name", lineno);
      continue;
    }
    if (line.rfind("states:", 0) == 0) {
      for (const std::string& n : split_commas(line.substr(7))) {
        check_declared_name(n, lineno);
        states.push_back(Var::state(n));
      }
      continue;
    }
    if (line.rfind("inputs:", 0) == 0) {
      for (const std::string& n : split_commas(line.substr(7))) {
        check_declared_name(n, lineno);
        inputs.push_back(Var::input(n));
      }
      continue;
    }
    if (line.rfind("equilibrium:", 0) == 0) {
      for (const std::string& entry : split_commas(line.substr(12))) {
        size_t eqpos = entry.find('=');
        if (eqpos == std::string::npos)
          throw FileFormatError("equilibrium entries take the form var=value", lineno);
        std::string n = trim(entry.substr(0, eqpos));
        if (!declared) {
          for (const Var& v : states) symbols[v.display()] = v;
          for (const Var& v : inputs) symbols[v.display()] = v;
          declared = true;
        }
        auto it = symbols.find(n);
        if (it == symbols.end())
          throw FileFormatError("equilibrium names undeclared variable '" + n + "'", lineno);
        eq[it->second] = parse_rational(trim(entry.substr(eqpos + 1)), lineno);
      }
      continue;
    }

    size_t eqpos = line.find('=');
    if (eqpos == std::string::npos)
      throw FileFormatError("expected a declaration or an update line", lineno);
    std::string lhs = trim(line.substr(0, eqpos));
    if (lhs.size() < 2 || lhs.back() != '+')
      throw FileFormatError("update left side must be a state followed by '+'", lineno);
    std::string sname = trim(lhs.substr(0, lhs.size() - 1));
    if (!declared) {
      for (const Var& v : states) symbols[v.display()] = v;
      for (const Var& v : inputs) symbols[v.display()] = v;
      declared = true;
    }
    auto it = symbols.find(sname);
    if (it == symbols.end() || it->second.kind() != VarKind::State)
      throw FileFormatError("'" + sname + "' is not a declared state", lineno);
    if (f.count(it->second))
      throw FileFormatError("duplicate update for " + sname + " (first at line " +
                                std::to_string(update_lines[it->second]) + ")",
                            lineno);
    try {
      f[it->second] = parse_expr(line.substr(eqpos + 1), symbols);
    } catch (const SyntaxError& e) {
      throw FileFormatError("in update of " + sname + ": " + e.what(), lineno);
    } catch (const UndeclaredIdentifier& e) {
      throw FileFormatError("in update of " + sname + ": " + e.what(), lineno);
    }
    update_lines[it->second] = lineno;
  }

  for (const Var& s : states)
    if (!f.count(s))
      throw FileFormatError("state " + s.display() + " has no update line", lineno);

  return DiscreteSystem(name, states, inputs, f, eq);
}

DiscreteSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();

  std::string stem = path;
  size_t slash = stem.find_last_of("/\\");
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);

  return parse_system_text(buf.str(), stem);
}

std::string system_to_text(const DiscreteSystem& sys) {
  std::ostringstream out;
  out << "system " << sys.name() << "\n";
  out << "states:";
  for (size_t i = 0; i < sys.states().size(); ++i)
    out << (i ? ", " : " ") << sys.states()[i].display();
  out << "\ninputs:";
  for (size_t i = 0; i < sys.inputs().size(); ++i)
    out << (i ? ", " : " ") << sys.inputs()[i].display();
  out << "\n";
  if (!sys.equilibrium().empty()) {
    out << "equilibrium:";
    bool first = true;
    for (const auto& [v, q] : sys.equilibrium()) {
      out << (first ? " " : ", ") << v.display() << "=" << q.get_str();
      first = false;
    }
    out << "\n";
  }
  for (const Var& s : sys.states())
    out << s.display() << "+ = " << sys.rhs(s).str() << "\n";
  return out.str();
}

}  // namespace flatnf
