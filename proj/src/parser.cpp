#include "scengen/parser.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

namespace scengen {

namespace {

enum class Tok {
  Ident,
  String,
  Int,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Arrow,
  Equals,
  End,
  Bad,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier, decoded string, integer digits or error text
  int line = 1;
  int col = 1;
  bool first_on_line = false;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Int: return "integer";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'->'";
    case Tok::Equals: return "'='";
    case Tok::End: return "end of input";
    case Tok::Bad: return "invalid token";
  }
  return "token";
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    int last_line = 0;
    for (;;) {
      skip_trivia();
      Token t = lex_one();
      t.first_on_line = t.line != last_line;
      last_line = t.line;
      const bool done = t.kind == Tok::End;
      out.push_back(std::move(t));
      if (done) break;
    }
    return out;
  }

private:
  bool at_end() const { return pos_ >= src_.size(); }
  char cur() const { return src_[pos_]; }

  void advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;
    }
  }

  void skip_trivia() {
    while (!at_end()) {
      const char c = cur();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (!at_end() && cur() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(Tok kind, std::string text, int line, int col) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line;
    t.col = col;
    return t;
  }

  Token lex_one() {
    const int line = line_;
    const int col = col_;
    if (at_end()) return make(Tok::End, {}, line, col);
    const char c = cur();

    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (!at_end() && is_ident_char(cur())) advance();
      return make(Tok::Ident, std::string(src_.substr(start, pos_ - start)), line, col);
    }
    if (is_digit(c) || ((c == '+' || c == '-') && pos_ + 1 < src_.size() &&
                        is_digit(src_[pos_ + 1]))) {
      const std::size_t start = pos_;
      advance();
      while (!at_end() && is_digit(cur())) advance();
      return make(Tok::Int, std::string(src_.substr(start, pos_ - start)), line, col);
    }
    if (c == '"') return lex_string(line, col);

    advance();
    switch (c) {
      case '{': return make(Tok::LBrace, "{", line, col);
      case '}': return make(Tok::RBrace, "}", line, col);
      case '(': return make(Tok::LParen, "(", line, col);
      case ')': return make(Tok::RParen, ")", line, col);
      case '[': return make(Tok::LBracket, "[", line, col);
      case ']': return make(Tok::RBracket, "]", line, col);
      case ',': return make(Tok::Comma, ",", line, col);
      case ':': return make(Tok::Colon, ":", line, col);
      case '=': return make(Tok::Equals, "=", line, col);
      case '-':
        if (!at_end() && cur() == '>') {
          advance();
          return make(Tok::Arrow, "->", line, col);
        }
        break;
      default:
        break;
    }
    // Swallow the rest of a multi-byte sequence so the error names one character.
    while (!at_end() && (static_cast<unsigned char>(cur()) & 0xC0) == 0x80) advance();
    return make(Tok::Bad, "unexpected character", line, col);
  }

  Token lex_string(int line, int col) {
    advance();  // opening quote
    std::string value;
    while (!at_end()) {
      const char c = cur();
      if (c == '"') {
        advance();
        return make(Tok::String, std::move(value), line, col);
      }
      if (c == '\\') {
        advance();
        if (at_end()) break;
        const char e = cur();
        if (e != '"' && e != '\\') {
          Token bad = make(Tok::Bad, "unsupported escape sequence", line_, col_ - 1);
          // Skip to the closing quote so lexing can resync.
          while (!at_end() && cur() != '"') advance();
          if (!at_end()) advance();
          return bad;
        }
        value.push_back(e);
        advance();
        continue;
      }
      value.push_back(c);
      advance();
    }
    return make(Tok::Bad, "unterminated string", line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Loc {
  int line = 1;
  int col = 1;
};

bool is_top_keyword(std::string_view s) {
  return s == "role" || s == "entity" || s == "state" || s == "transition" || s == "goal" ||
         s == "metadata" || s == "mode";
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParseResult run() {
    parse_file();
    if (errors_.empty()) check_semantics();
    ParseResult result;
    if (errors_.empty()) {
      result.doc = normalize(std::move(doc_));
    } else {
      std::stable_sort(errors_.begin(), errors_.end(), [](const ParseError& a, const ParseError& b) {
        return std::tie(a.line, a.column) < std::tie(b.line, b.column);
      });
      result.errors = std::move(errors_);
    }
    return result;
  }

private:
  struct Abort {};

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }

  Token next() {
    Token t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    if (t.kind == Tok::LBrace) ++depth_;
    if (t.kind == Tok::RBrace) --depth_;
    return t;
  }

  void add_error(Loc at, ParseErrorKind kind, std::string msg) {
    errors_.push_back({at.line, at.col, std::move(msg), kind});
  }

  [[noreturn]] void fail(const Token& at, ParseErrorKind kind, std::string msg) {
    if (at.kind == Tok::Bad) {
      add_error({at.line, at.col}, ParseErrorKind::Syntax, at.text);
    } else {
      add_error({at.line, at.col}, kind, std::move(msg));
    }
    throw Abort{};
  }

  [[noreturn]] void unexpected(const Token& at, std::string_view wanted) {
    std::string got = at.kind == Tok::Ident ? "'" + at.text + "'" : std::string(describe(at.kind));
    fail(at, ParseErrorKind::Syntax, "expected " + std::string(wanted) + ", found " + got);
  }

  Token expect(Tok kind, std::string_view what = {}) {
    if (peek().kind != kind) unexpected(peek(), what.empty() ? describe(kind) : what);
    return next();
  }

  Token expect_word(std::string_view word) {
    if (peek().kind != Tok::Ident || peek().text != word) {
      unexpected(peek(), "'" + std::string(word) + "'");
    }
    return next();
  }

  int expect_int(std::string_view what) {
    const Token t = peek();
    if (t.kind == Tok::String || t.kind == Tok::Ident) {
      // A well-formed value of the wrong type.
      fail(t, ParseErrorKind::TypeMismatch, "expected " + std::string(what) + ", found '" + t.text + "'");
    }
    if (t.kind != Tok::Int) unexpected(t, what);
    next();
    const char* first = t.text.data();
    if (*first == '+') ++first;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(first, t.text.data() + t.text.size(), v);
    if (ec != std::errc() || v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max()) {
      fail(t, ParseErrorKind::TypeMismatch, "integer out of range: " + t.text);
    }
    return static_cast<int>(v);
  }

  std::string expect_action_name() {
    const Token t = expect(Tok::Ident, "action name");
    if (!is_valid_action_name(t.text)) {
      fail(t, ParseErrorKind::TypeMismatch,
           "action name '" + t.text + "' must match [a-z][a-z0-9_]{0,63}");
    }
    return t.text;
  }

  void set_once(bool& seen, const Token& at) {
    if (seen) fail(at, ParseErrorKind::Syntax, "duplicate attribute '" + at.text + "'");
    seen = true;
  }

  // ---- grammar -----------------------------------------------------------

  void parse_file() {
    try {
      scenario_loc_ = loc(peek());
      expect_word("scenario");
      doc_.name = expect(Tok::String, "scenario name string").text;
      expect(Tok::LBrace);
    } catch (const Abort&) {
      return;
    }
    const int base = depth_;

    while (peek().kind != Tok::RBrace && peek().kind != Tok::End) {
      const std::size_t before = pos_;
      try {
        parse_item();
      } catch (const Abort&) {
        recover(base);
        if (pos_ == before) next();
      }
    }
    try {
      expect(Tok::RBrace, "'}' closing the scenario");
      if (peek().kind != Tok::End) unexpected(peek(), "end of input");
    } catch (const Abort&) {
    }
  }

  void recover(int base) {
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::End) return;
      if (t.kind == Tok::Ident && t.first_on_line && is_top_keyword(t.text) &&
          peek(1).kind != Tok::Colon) {
        depth_ = base;
        return;
      }
      if (t.kind == Tok::RBrace && depth_ == base) return;
      next();
    }
  }

  void parse_item() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) unexpected(t, "a block keyword");
    if (t.text == "role") return parse_role();
    if (t.text == "entity") return parse_entity();
    if (t.text == "state") return parse_state();
    if (t.text == "transition") return parse_transition();
    if (t.text == "goal") return parse_goal();
    if (t.text == "metadata") return parse_metadata();
    if (t.text == "mode") {
      next();
      expect(Tok::Colon);
      const Token m = expect(Tok::Ident, "scenario mode");
      auto mode = mode_from_string(m.text);
      if (!mode) fail(m, ParseErrorKind::TypeMismatch, "unsupported mode '" + m.text + "'");
      doc_.mode = *mode;
      return;
    }
    fail(t, ParseErrorKind::UnknownKeyword, "unknown keyword '" + t.text + "'");
  }

  static Loc loc(const Token& t) { return {t.line, t.col}; }

  GridPos parse_position() {
    const Token open = expect(Tok::LParen, "'(' starting a position");
    GridPos p;
    p.x = expect_int("x coordinate");
    expect(Tok::Comma);
    p.y = expect_int("y coordinate");
    expect(Tok::RParen);
    if (!p.valid()) {
      fail(open, ParseErrorKind::TypeMismatch,
           "position must lie in [0, " + std::to_string(kGridSize) + ")");
    }
    return p;
  }

  ActionSpec parse_action_call() {
    expect_word("action");
    expect(Tok::LParen);
    ActionSpec a;
    a.name = expect_action_name();
    if (peek().kind == Tok::Comma) {
      next();
      expect_word("target");
      expect(Tok::Equals);
      a.target = expect(Tok::Ident, "target entity").text;
    }
    expect(Tok::RParen);
    return a;
  }

  std::vector<ActionSpec> parse_action_list() {
    std::vector<ActionSpec> out;
    expect(Tok::LBracket);
    if (peek().kind != Tok::RBracket) {
      out.push_back(parse_action_call());
      while (peek().kind == Tok::Comma) {
        next();
        out.push_back(parse_action_call());
      }
    }
    expect(Tok::RBracket);
    return out;
  }

  BehaviorSpec parse_behavior() {
    const Token kw = expect(Tok::Ident, "behavior kind");
    auto kind = behavior_kind_from_string(kw.text);
    if (!kind) fail(kw, ParseErrorKind::UnknownKeyword, "unknown behavior '" + kw.text + "'");
    BehaviorSpec b;
    b.kind = *kind;
    switch (b.kind) {
      case BehaviorKind::Idle:
        break;
      case BehaviorKind::Script:
      case BehaviorKind::PriorityList: {
        auto list = parse_action_list();
        if (list.empty()) fail(kw, ParseErrorKind::TypeMismatch, kw.text + " needs at least one action");
        (b.kind == BehaviorKind::Script ? b.script : b.priorities) = std::move(list);
        break;
      }
      case BehaviorKind::Chase:
      case BehaviorKind::Attack:
      case BehaviorKind::Interact:
        expect(Tok::LParen);
        b.target = expect(Tok::Ident, "behavior target").text;
        if (b.kind == BehaviorKind::Attack && peek().kind == Tok::Comma) {
          next();
          expect_word("damage");
          expect(Tok::Equals);
          const Token at = peek();
          b.attack_damage = expect_int("attack damage");
          if (b.attack_damage < 0) fail(at, ParseErrorKind::TypeMismatch, "attack damage must be >= 0");
        }
        expect(Tok::RParen);
        break;
    }
    return b;
  }

  void parse_role() {
    const Token kw = next();
    Role r;
    r.name = expect(Tok::Ident, "role name").text;
    expect(Tok::LBrace);
    bool controller = false, health = false, position = false, behavior = false;
    while (peek().kind != Tok::RBrace) {
      const Token attr = expect(Tok::Ident, "role attribute or '}'");
      if (attr.text == "player" || attr.text == "npc") {
        set_once(controller, attr);
        r.controller = attr.text == "player" ? Controller::Player : Controller::Npc;
      } else if (attr.text == "health") {
        set_once(health, attr);
        expect(Tok::Colon);
        const Token at = peek();
        r.health = expect_int("health value");
        if (r.health < 0) fail(at, ParseErrorKind::TypeMismatch, "health must be >= 0");
      } else if (attr.text == "position") {
        set_once(position, attr);
        expect(Tok::Colon);
        r.position = parse_position();
      } else if (attr.text == "behavior") {
        set_once(behavior, attr);
        expect(Tok::Colon);
        r.behavior = parse_behavior();
      } else {
        fail(attr, ParseErrorKind::UnknownKeyword, "unknown role attribute '" + attr.text + "'");
      }
    }
    expect(Tok::RBrace);
    if (!controller) fail(kw, ParseErrorKind::Syntax, "role '" + r.name + "' must be 'player' or 'npc'");
    doc_.roles.push_back(std::move(r));
    role_locs_.push_back(loc(kw));
  }

  void parse_entity() {
    const Token kw = next();
    Entity e;
    e.name = expect(Tok::Ident, "entity name").text;
    expect(Tok::LBrace);
    bool tag = false, placeholder = false, position = false, verbs = false;
    while (peek().kind != Tok::RBrace) {
      const Token attr = expect(Tok::Ident, "entity attribute or '}'");
      if (attr.text == "tag") {
        set_once(tag, attr);
        expect(Tok::Colon);
        const Token v = expect(Tok::String, "tag string");
        if (v.text.empty()) fail(v, ParseErrorKind::TypeMismatch, "tag must not be empty");
        e.tag = v.text;
      } else if (attr.text == "placeholder") {
        set_once(placeholder, attr);
        expect(Tok::Colon);
        const Token v = expect(Tok::Ident, "placeholder shape");
        auto shape = placeholder_from_string(v.text);
        if (!shape) fail(v, ParseErrorKind::TypeMismatch, "placeholder must be cube, sphere or capsule");
        e.placeholder = *shape;
      } else if (attr.text == "position") {
        set_once(position, attr);
        expect(Tok::Colon);
        e.position = parse_position();
      } else if (attr.text == "verbs") {
        set_once(verbs, attr);
        expect(Tok::Colon);
        expect(Tok::LBracket);
        while (peek().kind != Tok::RBracket) {
          if (!e.verbs.empty()) expect(Tok::Comma);
          const Token v = expect(Tok::Ident, "verb");
          auto verb = verb_from_string(v.text);
          if (!verb) fail(v, ParseErrorKind::TypeMismatch, "unknown verb '" + v.text + "'");
          if (!e.verbs.insert(*verb).second) {
            fail(v, ParseErrorKind::Syntax, "verb '" + v.text + "' listed twice");
          }
        }
        expect(Tok::RBracket);
      } else {
        fail(attr, ParseErrorKind::UnknownKeyword, "unknown entity attribute '" + attr.text + "'");
      }
    }
    expect(Tok::RBrace);
    if (!tag) fail(kw, ParseErrorKind::TypeMismatch, "entity '" + e.name + "' needs a tag");
    doc_.entities.push_back(std::move(e));
    entity_locs_.push_back(loc(kw));
  }

  void parse_state() {
    const Token kw = next();
    StateNode s;
    s.name = expect(Tok::Ident, "state name").text;
    expect(Tok::LBrace);
    bool kind = false, description = false, feedback = false;
    while (peek().kind != Tok::RBrace) {
      const Token attr = expect(Tok::Ident, "state attribute or '}'");
      if (auto k = state_kind_from_string(attr.text)) {
        set_once(kind, attr);
        s.kind = *k;
      } else if (attr.text == "description") {
        set_once(description, attr);
        expect(Tok::Colon);
        s.description = expect(Tok::String, "description string").text;
      } else if (attr.text == "feedback") {
        set_once(feedback, attr);
        expect(Tok::Colon);
        s.on_enter_feedback = expect(Tok::String, "feedback string").text;
      } else {
        fail(attr, ParseErrorKind::UnknownKeyword, "unknown state attribute '" + attr.text + "'");
      }
    }
    expect(Tok::RBrace);
    doc_.states.push_back(std::move(s));
    state_locs_.push_back(loc(kw));
  }

  void parse_transition() {
    const Token kw = next();
    TransitionRule t;
    t.from = expect(Tok::Ident, "source state").text;
    expect(Tok::Arrow);
    t.to = expect(Tok::Ident, "target state").text;
    expect_word("on");
    t.action = parse_action_call();
    expect_word("by");
    t.actor = expect(Tok::Ident, "actor role").text;
    if (peek().kind == Tok::LBrace) {
      next();
      bool feedback = false, dialogue = false;
      while (peek().kind != Tok::RBrace) {
        const Token attr = expect(Tok::Ident, "transition attribute or '}'");
        if (attr.text == "score") {
          expect(Tok::Colon);
          t.effects.push_back({EffectKind::Score, expect_int("score delta"), std::nullopt});
        } else if (attr.text == "health") {
          expect(Tok::LParen);
          std::string subject = expect(Tok::Ident, "role name").text;
          expect(Tok::RParen);
          expect(Tok::Colon);
          t.effects.push_back({EffectKind::Health, expect_int("health delta"), std::move(subject)});
        } else if (attr.text == "feedback") {
          set_once(feedback, attr);
          expect(Tok::Colon);
          t.feedback = expect(Tok::String, "feedback string").text;
        } else if (attr.text == "dialogue") {
          set_once(dialogue, attr);
          expect(Tok::Colon);
          t.action.dialogue = expect(Tok::String, "dialogue string").text;
        } else {
          fail(attr, ParseErrorKind::UnknownKeyword,
               "unknown transition attribute '" + attr.text + "'");
        }
      }
      expect(Tok::RBrace);
    }
    doc_.transitions.push_back(std::move(t));
    transition_locs_.push_back(loc(kw));
  }

  void parse_goal() {
    const Token kw = next();
    const Token kind = expect(Tok::Ident, "goal kind");
    if (kind.text != "reach") fail(kind, ParseErrorKind::UnknownKeyword, "unknown goal '" + kind.text + "'");
    expect(Tok::LParen);
    Goal g;
    g.state = expect(Tok::Ident, "state name").text;
    expect(Tok::RParen);
    doc_.goals.push_back(std::move(g));
    goal_locs_.push_back(loc(kw));
  }

  void parse_metadata() {
    next();
    expect(Tok::LBrace);
    while (peek().kind != Tok::RBrace) {
      const Token key = expect(Tok::Ident, "metadata key or '}'");
      expect(Tok::Colon);
      std::string value = expect(Tok::String, "metadata value string").text;
      if (!doc_.metadata.emplace(key.text, std::move(value)).second) {
        fail(key, ParseErrorKind::DuplicateId, "duplicate metadata key '" + key.text + "'");
      }
    }
    expect(Tok::RBrace);
  }

  // ---- semantic checks ---------------------------------------------------

  template <typename T>
  void check_unique(const std::vector<T>& items, const std::vector<Loc>& locs, IdKind kind) {
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!seen.insert(items[i].name).second) {
        add_error(locs[i], ParseErrorKind::DuplicateId,
                  "duplicate " + std::string(to_string(kind)) + " '" + items[i].name + "'");
      }
    }
  }

  void check_action_target(const ActionSpec& a, Loc at) {
    if (!a.target) return;
    const Entity* e = doc_.find_entity(*a.target);
    if (!e) {
      add_error(at, ParseErrorKind::DanglingReference, "unknown entity '" + *a.target + "'");
    } else if (auto verb = verb_from_action(a.name); verb && !e->verbs.count(*verb)) {
      add_error(at, ParseErrorKind::TypeMismatch,
                "entity '" + e->name + "' does not support verb '" + a.name + "'");
    }
  }

  void check_semantics() {
    check_unique(doc_.roles, role_locs_, IdKind::Role);
    check_unique(doc_.entities, entity_locs_, IdKind::Entity);
    check_unique(doc_.states, state_locs_, IdKind::State);

    int players = 0;
    for (std::size_t i = 0; i < doc_.roles.size(); ++i) {
      const Role& r = doc_.roles[i];
      const Loc at = role_locs_[i];
      if (r.controller == Controller::Player) {
        if (++players == 2) {
          add_error(at, ParseErrorKind::TypeMismatch, "only one player role is supported");
        }
        if (r.behavior) {
          add_error(at, ParseErrorKind::TypeMismatch, "player role '" + r.name + "' cannot have a behavior");
        }
      }
      if (!r.behavior) continue;
      const BehaviorSpec& b = *r.behavior;
      if (b.target) {
        const bool is_role = doc_.find_role(*b.target) != nullptr;
        const bool is_entity = doc_.find_entity(*b.target) != nullptr;
        if (!is_role && !is_entity) {
          add_error(at, ParseErrorKind::DanglingReference, "unknown behavior target '" + *b.target + "'");
        } else if (b.kind == BehaviorKind::Attack && !is_role) {
          add_error(at, ParseErrorKind::TypeMismatch, "attack target '" + *b.target + "' must be a role");
        } else if (b.kind == BehaviorKind::Interact && !is_entity) {
          add_error(at, ParseErrorKind::TypeMismatch, "interact target '" + *b.target + "' must be an entity");
        }
      }
      for (const auto& a : b.script) check_action_target(a, at);
      for (const auto& a : b.priorities) check_action_target(a, at);
    }
    if (players == 0) add_error(scenario_loc_, ParseErrorKind::TypeMismatch, "scenario declares no player role");

    int entries = 0, exits = 0;
    for (std::size_t i = 0; i < doc_.states.size(); ++i) {
      if (doc_.states[i].kind == StateKind::Entry && ++entries == 2) {
        add_error(state_locs_[i], ParseErrorKind::Syntax, "second entry state '" + doc_.states[i].name + "'");
      }
      if (doc_.states[i].kind == StateKind::Exit) ++exits;
    }
    if (entries == 0) add_error(scenario_loc_, ParseErrorKind::Syntax, "scenario declares no entry state");
    if (exits == 0) add_error(scenario_loc_, ParseErrorKind::Syntax, "scenario declares no exit state");

    std::set<std::tuple<std::string, std::string, std::optional<std::string>>> keys;
    for (std::size_t i = 0; i < doc_.transitions.size(); ++i) {
      const TransitionRule& t = doc_.transitions[i];
      const Loc at = transition_locs_[i];
      for (const auto* state : {&t.from, &t.to}) {
        if (!doc_.find_state(*state)) {
          add_error(at, ParseErrorKind::DanglingReference, "unknown state '" + *state + "'");
        }
      }
      if (!doc_.find_role(t.actor)) {
        add_error(at, ParseErrorKind::DanglingReference, "unknown role '" + t.actor + "'");
      }
      check_action_target(t.action, at);
      for (const auto& fx : t.effects) {
        if (fx.subject && !doc_.find_role(*fx.subject)) {
          add_error(at, ParseErrorKind::DanglingReference, "unknown role '" + *fx.subject + "'");
        }
      }
      if (!keys.emplace(t.from, t.action.name, t.action.target).second) {
        add_error(at, ParseErrorKind::DuplicateId,
                  "action '" + t.action.name + "' already dispatches from state '" + t.from + "'");
      }
    }

    for (std::size_t i = 0; i < doc_.goals.size(); ++i) {
      const StateNode* s = doc_.find_state(doc_.goals[i].state);
      if (!s) {
        add_error(goal_locs_[i], ParseErrorKind::DanglingReference,
                  "unknown state '" + doc_.goals[i].state + "'");
      } else if (s->kind != StateKind::Exit) {
        add_error(goal_locs_[i], ParseErrorKind::TypeMismatch, "goal state '" + s->name + "' is not an exit");
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<ParseError> errors_;
  ScenarioDoc doc_;
  Loc scenario_loc_;
  std::vector<Loc> role_locs_, entity_locs_, state_locs_, transition_locs_, goal_locs_;
};

// ---- serializer ------------------------------------------------------------

std::string quote(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string action_call(const ActionSpec& a) {
  std::string out = "action(" + a.name;
  if (a.target) out += ", target=" + *a.target;
  return out + ")";
}

std::string action_list(const std::vector<ActionSpec>& list) {
  std::string out = "[";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ", ";
    out += action_call(list[i]);
  }
  return out + "]";
}

std::string position(const GridPos& p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

std::string behavior(const BehaviorSpec& b) {
  std::string out(to_string(b.kind));
  switch (b.kind) {
    case BehaviorKind::Idle: break;
    case BehaviorKind::Script: out += action_list(b.script); break;
    case BehaviorKind::PriorityList: out += action_list(b.priorities); break;
    case BehaviorKind::Chase:
    case BehaviorKind::Interact: out += "(" + b.target.value_or("") + ")"; break;
    case BehaviorKind::Attack:
      out += "(" + b.target.value_or("") + ", damage=" + std::to_string(b.attack_damage) + ")";
      break;
  }
  return out;
}

std::string signed_int(int v) { return (v > 0 ? "+" : "") + std::to_string(v); }

}  // namespace

ParseResult parse(std::string_view source) {
  std::string text;
  text.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\r' && i + 1 < source.size() && source[i + 1] == '\n') continue;
    text.push_back(source[i]);
  }
  Parser parser(Lexer(text).run());
  return parser.run();
}

std::string serialize(const ScenarioDoc& input) {
  const ScenarioDoc doc = normalize(input);
  std::ostringstream os;
  os << "scenario " << quote(doc.name) << " {\n";
  os << "  mode: " << to_string(doc.mode) << "\n";
  if (!doc.metadata.empty()) {
    os << "\n  metadata {\n";
    for (const auto& [k, v] : doc.metadata) os << "    " << k << ": " << quote(v) << "\n";
    os << "  }\n";
  }
  for (const auto& r : doc.roles) {
    os << "\n  role " << r.name << " {\n";
    os << "    " << to_string(r.controller) << "\n";
    os << "    health: " << r.health << "\n";
    if (r.position) os << "    position: " << position(*r.position) << "\n";
    if (r.behavior) os << "    behavior: " << behavior(*r.behavior) << "\n";
    os << "  }\n";
  }
  for (const auto& e : doc.entities) {
    os << "\n  entity " << e.name << " {\n";
    os << "    tag: " << quote(e.tag) << "\n";
    os << "    placeholder: " << to_string(e.placeholder) << "\n";
    if (e.position) os << "    position: " << position(*e.position) << "\n";
    if (!e.verbs.empty()) {
      os << "    verbs: [";
      bool first = true;
      for (Verb v : e.verbs) {
        os << (first ? "" : ", ") << to_string(v);
        first = false;
      }
      os << "]\n";
    }
    os << "  }\n";
  }
  for (const auto& s : doc.states) {
    os << "\n  state " << s.name << " {\n";
    os << "    " << to_string(s.kind) << "\n";
    os << "    description: " << quote(s.description) << "\n";
    if (s.on_enter_feedback) os << "    feedback: " << quote(*s.on_enter_feedback) << "\n";
    os << "  }\n";
  }
  if (!doc.transitions.empty()) os << "\n";
  for (const auto& t : doc.transitions) {
    os << "  transition " << t.from << " -> " << t.to << " on " << action_call(t.action) << " by "
       << t.actor;
    if (t.effects.empty() && !t.feedback && !t.action.dialogue) {
      os << "\n";
      continue;
    }
    os << " {\n";
    for (const auto& fx : t.effects) {
      if (fx.kind == EffectKind::Score) {
        os << "    score: " << signed_int(fx.delta) << "\n";
      } else {
        os << "    health(" << fx.subject.value_or("") << "): " << signed_int(fx.delta) << "\n";
      }
    }
    if (t.feedback) os << "    feedback: " << quote(*t.feedback) << "\n";
    if (t.action.dialogue) os << "    dialogue: " << quote(*t.action.dialogue) << "\n";
    os << "  }\n";
  }
  if (!doc.goals.empty()) os << "\n";
  for (const auto& g : doc.goals) os << "  goal reach(" << g.state << ")\n";
  os << "}\n";
  return os.str();
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::Syntax: return "Syntax";
    case ParseErrorKind::UnknownKeyword: return "UnknownKeyword";
    case ParseErrorKind::DuplicateId: return "DuplicateId";
    case ParseErrorKind::DanglingReference: return "DanglingReference";
    case ParseErrorKind::TypeMismatch: return "TypeMismatch";
  }
  return "?";
}

std::string format_error(const ParseError& e, std::string_view file) {
  std::ostringstream os;
  if (!file.empty()) os << file << ":";
  os << e.line << ":" << e.column << ": " << to_string(e.kind) << ": " << e.message;
  return os.str();
}

}  // namespace scengen
