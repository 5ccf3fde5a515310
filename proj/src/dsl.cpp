#include "cua/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "cua/keys.hpp"
#include "cua/util.hpp"

namespace cua::dsl {

using core::AgentAction;
using core::MouseButton;
using core::Point;
using core::Resolution;

namespace {

struct Value {
  enum class Type { number, text } type = Type::number;
  double num = 0.0;
  bool is_int = false;
  std::string text;
  std::size_t offset = 0;
};

struct Arg {
  std::optional<std::string> name;
  Value value;
};

struct Call {
  std::string ns;    // "" | "pyautogui" | "computer" | ...
  std::string name;  // function name as written
  std::vector<Arg> args;
};

class Scanner {
 public:
  explicit Scanner(const std::string& text) : text_(text) {}

  std::size_t pos() const { return pos_; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    skip_ws();
    if (peek() != c)
      throw CuaError(Err::parse_error,
                     std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start)
      throw CuaError(Err::parse_error, "expected identifier", pos_);
    return text_.substr(start, pos_ - start);
  }

  Value string_literal() {
    char quote = peek();
    Value v;
    v.type = Value::Type::text;
    v.offset = pos_;
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size()) {
        char e = text_[pos_ + 1];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: out += e; break;
        }
        pos_ += 2;
      } else {
        out += c;
        ++pos_;
      }
    }
    if (pos_ >= text_.size())
      throw CuaError(Err::parse_error, "unterminated string", v.offset);
    ++pos_;  // closing quote
    v.text = std::move(out);
    return v;
  }

  Value number_literal() {
    skip_ws();
    Value v;
    v.offset = pos_;
    std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    bool saw_digit = false, saw_dot = false, saw_exp = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        saw_digit = true;
        ++pos_;
      } else if (c == '.' && !saw_dot && !saw_exp) {
        saw_dot = true;
        ++pos_;
      } else if ((c == 'e' || c == 'E') && saw_digit && !saw_exp) {
        saw_exp = true;
        ++pos_;
        if (peek() == '+' || peek() == '-') ++pos_;
      } else {
        break;
      }
    }
    if (!saw_digit)
      throw CuaError(Err::parse_error, "expected number", start);
    std::string tok = text_.substr(start, pos_ - start);
    v.num = std::strtod(tok.c_str(), nullptr);
    v.is_int = !saw_dot && !saw_exp;
    return v;
  }

  Value value() {
    skip_ws();
    if (peek() == '\'' || peek() == '"') return string_literal();
    return number_literal();
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

// Strip leading/trailing code fences (``` or ''') and an optional language
// tag so bare expressions and fenced expressions parse alike.
std::string strip_fences(const std::string& text) {
  std::string s = text;
  auto trim = [](std::string& t) {
    std::size_t b = t.find_first_not_of(" \t\r\n");
    std::size_t e = t.find_last_not_of(" \t\r\n");
    t = b == std::string::npos ? "" : t.substr(b, e - b + 1);
  };
  trim(s);
  for (const char* fence : {"```", "'''"}) {
    if (s.rfind(fence, 0) == 0) {
      s = s.substr(3);
      if (s.rfind("python", 0) == 0) s = s.substr(6);
      std::size_t close = s.rfind(fence);
      if (close != std::string::npos) s = s.substr(0, close);
      trim(s);
    }
  }
  return s;
}

Call parse_call(const std::string& text) {
  Scanner sc(text);
  Call call;
  std::string first = sc.ident();
  if (sc.consume('.')) {
    call.ns = first;
    call.name = sc.ident();
  } else {
    call.name = first;
  }
  sc.expect('(');
  if (!sc.consume(')')) {
    while (true) {
      sc.skip_ws();
      Arg arg;
      // Lookahead for `ident =` keyword form.
      std::size_t save = sc.pos();
      if (std::isalpha(static_cast<unsigned char>(sc.peek())) || sc.peek() == '_') {
        std::string name = sc.ident();
        if (sc.consume('=')) {
          arg.name = name;
        } else {
          throw CuaError(Err::parse_error, "bare identifier argument", save);
        }
      }
      arg.value = sc.value();
      call.args.push_back(std::move(arg));
      if (sc.consume(')')) break;
      sc.expect(',');
    }
  }
  if (!sc.at_end())
    throw CuaError(Err::parse_error, "trailing input after call", sc.pos());
  return call;
}

// Argument access helpers -----------------------------------------------------

class Args {
 public:
  Args(const Call& call, std::vector<std::string> positional_names)
      : names_(std::move(positional_names)) {
    std::size_t pos_index = 0;
    for (const Arg& a : call.args) {
      std::string name;
      if (a.name) {
        name = *a.name;
      } else {
        if (pos_index >= names_.size())
          throw CuaError(Err::parse_error, "too many positional arguments",
                         a.value.offset);
        name = names_[pos_index++];
      }
      if (by_name_.count(name))
        throw CuaError(Err::parse_error, "duplicate argument: " + name,
                       a.value.offset);
      by_name_.emplace(name, a.value);
    }
  }

  const Value* find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &it->second;
  }

  const Value& require(const std::string& name) const {
    const Value* v = find(name);
    if (!v)
      throw CuaError(Err::parse_error, "missing argument: " + name, 0);
    return *v;
  }

  void reject_unknown(std::initializer_list<const char*> known) const {
    for (const auto& [name, value] : by_name_) {
      bool ok = false;
      for (const char* k : known)
        if (name == k) ok = true;
      if (!ok)
        throw CuaError(Err::parse_error, "unknown argument: " + name,
                       value.offset);
    }
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, Value> by_name_;
};

double to_coord(const Value& v, std::optional<Resolution> res, bool is_x) {
  if (v.type != Value::Type::number)
    throw CuaError(Err::parse_error, "coordinate must be numeric", v.offset);
  double val = v.num;
  if (v.is_int && val > 1.0) {
    if (!res)
      throw CuaError(Err::domain_error,
                     "integer pixel coordinate requires a declared resolution",
                     v.offset);
    val = val / double(is_x ? res->width : res->height);
  }
  if (val < 0.0 || val > 1.0)
    throw CuaError(Err::domain_error, "coordinate outside [0,1]", v.offset);
  return quantize_coord(val);
}

int to_delta(const Value& v) {
  if (v.type != Value::Type::number || !v.is_int)
    throw CuaError(Err::parse_error, "wheel delta must be an integer", v.offset);
  return int(v.num);
}

std::string to_text(const Value& v) {
  if (v.type != Value::Type::text)
    throw CuaError(Err::parse_error, "expected a string", v.offset);
  return v.text;
}

MouseButton to_button(const Value& v) {
  std::string name = to_lower(to_text(v));
  if (name == "left") return MouseButton::left;
  if (name == "right") return MouseButton::right;
  if (name == "middle") return MouseButton::middle;
  throw CuaError(Err::domain_error, "unknown button: " + name, v.offset);
}

std::optional<Point> opt_pos(const Args& args, std::optional<Resolution> res) {
  const Value* x = args.find("x");
  const Value* y = args.find("y");
  if (!x && !y) return std::nullopt;
  if (!x || !y)
    throw CuaError(Err::parse_error, "position requires both x and y", 0);
  return Point{to_coord(*x, res, true), to_coord(*y, res, false)};
}

AgentAction dispatch(const Call& call, std::optional<Resolution> res) {
  const std::string& fn = call.name;

  auto xy_action = [&](auto make) -> AgentAction {
    Args args(call, {"x", "y", "button"});
    args.reject_unknown({"x", "y", "button"});
    double x = to_coord(args.require("x"), res, true);
    double y = to_coord(args.require("y"), res, false);
    std::optional<MouseButton> button;
    if (const Value* b = args.find("button")) button = to_button(*b);
    return make(x, y, button);
  };

  if (fn == "click") {
    return xy_action([](double x, double y, std::optional<MouseButton> b) -> AgentAction {
      MouseButton button = b.value_or(MouseButton::left);
      if (button == MouseButton::middle) return core::MiddleClick{x, y};
      return core::Click{x, y, button};
    });
  }
  if (fn == "rightClick" || fn == "right_click") {
    return xy_action([](double x, double y, std::optional<MouseButton>) -> AgentAction {
      return core::Click{x, y, MouseButton::right};
    });
  }
  if (fn == "middleClick" || fn == "middle_click") {
    return xy_action([](double x, double y, std::optional<MouseButton>) -> AgentAction {
      return core::MiddleClick{x, y};
    });
  }
  if (fn == "doubleClick" || fn == "double_click") {
    return xy_action([](double x, double y, std::optional<MouseButton> b) -> AgentAction {
      return core::DoubleClick{x, y, b.value_or(MouseButton::left)};
    });
  }
  if (fn == "tripleClick" || fn == "triple_click") {
    return xy_action([](double x, double y, std::optional<MouseButton> b) -> AgentAction {
      return core::TripleClick{x, y, b.value_or(MouseButton::left)};
    });
  }
  if (fn == "moveTo" || fn == "move_to") {
    return xy_action([](double x, double y, std::optional<MouseButton>) -> AgentAction {
      return core::MoveTo{x, y};
    });
  }
  if (fn == "dragTo" || fn == "drag_to") {
    // pyautogui's dragTo accepts a button; the action space does not keep it.
    return xy_action([](double x, double y, std::optional<MouseButton>) -> AgentAction {
      return core::DragTo{x, y};
    });
  }
  if (fn == "scroll" || fn == "hscroll") {
    bool horizontal = fn == "hscroll";
    // One positional delta is the primary axis; two are (dx, dy).
    std::size_t bare = 0;
    for (const Arg& a : call.args)
      if (!a.name) ++bare;
    std::vector<std::string> positional;
    if (horizontal || bare >= 2)
      positional = {"dx", "dy"};
    else
      positional = {"dy"};
    Args args(call, positional);
    args.reject_unknown({"dx", "dy", "x", "y"});
    int dx = 0, dy = 0;
    if (const Value* v = args.find("dx")) dx = to_delta(*v);
    if (const Value* v = args.find("dy")) dy = to_delta(*v);
    auto pos = opt_pos(args, res);
    AgentAction a = horizontal ? AgentAction(core::HScroll{dx, dy, pos})
                               : AgentAction(core::Scroll{dx, dy, pos});
    if (auto err = core::check_action(a))
      throw CuaError(Err::domain_error, *err, 0);
    return a;
  }
  if (fn == "write" || fn == "typewrite") {
    Args args(call, {"message"});
    args.reject_unknown({"message", "text"});
    const Value* v = args.find("message");
    if (!v) v = args.find("text");
    if (!v) throw CuaError(Err::parse_error, "write requires text", 0);
    std::string text = to_text(*v);
    if (text.empty())
      throw CuaError(Err::domain_error, "write text must be non-empty", v->offset);
    return core::Write{std::move(text)};
  }
  if (fn == "press") {
    Args args(call, {"keys", "presses"});
    args.reject_unknown({"keys", "presses", "key"});
    const Value* v = args.find("keys");
    if (!v) v = args.find("key");
    if (!v) throw CuaError(Err::parse_error, "press requires a key", 0);
    if (const Value* presses = args.find("presses")) {
      if (presses->type != Value::Type::number || !presses->is_int ||
          presses->num < 1)
        throw CuaError(Err::parse_error, "presses must be a positive integer",
                       presses->offset);
      // Repeat counts collapse to a single press action.
    }
    return core::Press{keys::canonical(to_text(*v))};
  }
  if (fn == "hotkey") {
    std::vector<std::string> hk;
    for (const Arg& a : call.args) {
      if (a.name)
        throw CuaError(Err::parse_error, "hotkey takes positional keys only",
                       a.value.offset);
      hk.push_back(keys::canonical(to_text(a.value)));
    }
    if (hk.size() < 2)
      throw CuaError(Err::domain_error, "hotkey needs at least 2 keys", 0);
    return core::Hotkey{keys::canonical_hotkey(std::move(hk))};
  }
  if (fn == "wait") {
    if (!call.args.empty())
      throw CuaError(Err::parse_error, "wait takes no arguments",
                     call.args[0].value.offset);
    return core::Wait{};
  }
  if (fn == "terminate") {
    Args args(call, {"status"});
    args.reject_unknown({"status"});
    std::string status = to_lower(to_text(args.require("status")));
    if (status != "success" && status != "failure")
      throw CuaError(Err::domain_error, "terminate status must be success or failure", 0);
    return core::Terminate{core::status_from_name(status)};
  }
  throw CuaError(Err::unsupported_action, "unknown action function: " + fn);
}

std::string quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c; break;
    }
  }
  out += "'";
  return out;
}

}  // namespace

AgentAction parse_action(const std::string& text,
                         std::optional<Resolution> resolution) {
  std::string expr = strip_fences(text);
  if (expr.empty()) throw CuaError(Err::parse_error, "empty action text", 0);
  Call call = parse_call(expr);
  if (!call.ns.empty() && call.ns != "pyautogui" && call.ns != "computer")
    throw CuaError(Err::unsupported_action, "unknown namespace: " + call.ns);
  AgentAction action = dispatch(call, resolution);
  if (auto err = core::check_action(action))
    throw CuaError(Err::domain_error, *err, 0);
  return action;
}

std::string render_action(const AgentAction& action) {
  using std::string;
  auto xy = [](double x, double y) {
    return "x=" + format_coord(x) + ", y=" + format_coord(y);
  };
  struct V {
    decltype(xy)& fmt;
    string operator()(const core::Click& c) {
      string out = "pyautogui.click(" + fmt(c.x, c.y);
      if (c.button != MouseButton::left)
        out += ", button=" + quote(core::button_name(c.button));
      return out + ")";
    }
    string operator()(const core::MiddleClick& c) {
      return "pyautogui.middleClick(" + fmt(c.x, c.y) + ")";
    }
    string operator()(const core::DoubleClick& c) {
      string out = "pyautogui.doubleClick(" + fmt(c.x, c.y);
      if (c.button != MouseButton::left)
        out += ", button=" + quote(core::button_name(c.button));
      return out + ")";
    }
    string operator()(const core::TripleClick& c) {
      string out = "pyautogui.tripleClick(" + fmt(c.x, c.y);
      if (c.button != MouseButton::left)
        out += ", button=" + quote(core::button_name(c.button));
      return out + ")";
    }
    string operator()(const core::MoveTo& c) {
      return "pyautogui.moveTo(" + fmt(c.x, c.y) + ")";
    }
    string operator()(const core::DragTo& c) {
      return "pyautogui.dragTo(" + fmt(c.x, c.y) + ")";
    }
    string operator()(const core::Scroll& s) {
      string out = "pyautogui.scroll(dy=" + std::to_string(s.dy);
      if (s.pos) out += ", " + fmt(s.pos->x, s.pos->y);
      return out + ")";
    }
    string operator()(const core::HScroll& s) {
      string out = "pyautogui.hscroll(dx=" + std::to_string(s.dx);
      if (s.pos) out += ", " + fmt(s.pos->x, s.pos->y);
      return out + ")";
    }
    string operator()(const core::Write& w) {
      return "pyautogui.write(" + quote(w.text) + ")";
    }
    string operator()(const core::Press& p) {
      return "pyautogui.press(" + quote(p.key) + ")";
    }
    string operator()(const core::Hotkey& h) {
      string out = "pyautogui.hotkey(";
      for (std::size_t i = 0; i < h.keys.size(); ++i) {
        if (i) out += ", ";
        out += quote(h.keys[i]);
      }
      return out + ")";
    }
    string operator()(const core::Wait&) { return "computer.wait()"; }
    string operator()(const core::Terminate& t) {
      return "computer.terminate(status=" + quote(core::status_name(t.status)) + ")";
    }
  };
  return std::visit(V{xy}, action);
}

std::string section_name(Section s) {
  switch (s) {
    case Section::observation: return "Observation";
    case Section::thought: return "Thought";
    case Section::action: return "Action";
    case Section::code: return "Code";
  }
  return "?";
}

namespace {

std::optional<Section> match_section_header(const std::string& line,
                                            std::string* rest) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  while (i < line.size() && line[i] == '#') ++i;
  while (i < line.size() && (line[i] == ' ' || line[i] == '*')) ++i;
  static const std::pair<const char*, Section> kLabels[] = {
      {"Observation", Section::observation},
      {"Thought", Section::thought},
      {"Action", Section::action},
      {"Code", Section::code},
  };
  for (const auto& [label, section] : kLabels) {
    std::size_t n = std::string(label).size();
    if (line.compare(i, n, label) == 0) {
      std::size_t j = i + n;
      while (j < line.size() && (line[j] == '*' || line[j] == ' ')) ++j;
      if (j < line.size() && line[j] == ':') {
        *rest = line.substr(j + 1);
        return section;
      }
    }
  }
  return std::nullopt;
}

bool is_fence_line(const std::string& line) {
  std::string t = line;
  std::size_t b = t.find_first_not_of(" \t");
  if (b == std::string::npos) return false;
  return t.compare(b, 3, "```") == 0 || t.compare(b, 3, "'''") == 0;
}

// Normalizes fence markers to line breaks so both real fences and the
// literal '''python...''' one-liners split into scannable lines.
std::vector<std::string> payload_lines(const std::string& payload) {
  std::string normalized;
  normalized.reserve(payload.size());
  for (std::size_t i = 0; i < payload.size();) {
    if (payload.compare(i, 3, "```") == 0 || payload.compare(i, 3, "'''") == 0) {
      normalized += '\n';
      i += 3;
      if (payload.compare(i, 6, "python") == 0) i += 6;
    } else {
      normalized += payload[i];
      ++i;
    }
  }
  return split_lines(normalized);
}

std::optional<AgentAction> last_parsable(const std::string& payload,
                                         std::optional<Resolution> res) {
  auto lines = payload_lines(payload);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string line = *it;
    std::size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t");
    line = line.substr(b, e - b + 1);
    if (line.empty()) continue;
    try {
      return parse_action(line, res);
    } catch (const CuaError&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace

ParsedResponse extract_response(const std::string& text,
                                std::optional<Resolution> resolution) {
  ParsedResponse out;
  out.raw = text;

  // Pass 1: labeled sections.
  auto lines = split_lines(text);
  std::optional<Section> current;
  std::string buffer;
  auto flush = [&]() {
    if (!current) return;
    std::size_t b = buffer.find_first_not_of(" \t\n");
    std::size_t e = buffer.find_last_not_of(" \t\n");
    std::string content = b == std::string::npos ? "" : buffer.substr(b, e - b + 1);
    out.sections.emplace_back(*current, std::move(content));
    buffer.clear();
  };
  for (const std::string& line : lines) {
    std::string rest;
    if (auto section = match_section_header(line, &rest)) {
      flush();
      current = section;
      buffer = rest;
      continue;
    }
    if (current) buffer += "\n" + line;
  }
  flush();

  // Pass 2: locate the action. Prefer the final fenced block, then the last
  // Code section, then the full text.
  std::vector<std::string> candidates;
  {
    std::string block;
    std::vector<std::string> blocks;
    bool in_fence = false;
    for (const std::string& line : split_lines(text)) {
      if (is_fence_line(line)) {
        if (in_fence) {
          blocks.push_back(block);
          block.clear();
        }
        in_fence = !in_fence;
        continue;
      }
      if (in_fence) block += line + "\n";
    }
    if (in_fence && !block.empty()) blocks.push_back(block);  // unterminated fence
    if (!blocks.empty()) candidates.push_back(blocks.back());
  }
  for (auto it = out.sections.rbegin(); it != out.sections.rend(); ++it) {
    if (it->first == Section::code) {
      candidates.push_back(it->second);
      break;
    }
  }
  candidates.push_back(text);

  for (const std::string& candidate : candidates) {
    if (auto action = last_parsable(candidate, resolution)) {
      out.action = *action;
      return out;
    }
  }
  throw CuaError(Err::no_action, "no parsable action in response");
}

}  // namespace cua::dsl
