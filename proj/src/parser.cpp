#include "rxl/parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <unordered_set>

namespace rxl {

bool is_reserved_name(std::string_view name) {
  static const std::array<std::string_view, 8> hooks = {"get_member", "set_member", "call_member",
                                                        "get_local",  "set_local",  "get_global",
                                                        "set_global", "reify_scope"};
  for (auto h : hooks) {
    if (name == h) return true;
  }
  return name.rfind("_scope_", 0) == 0 || name.rfind("_tmp_", 0) == 0;
}

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok type = Tok::End;
  std::string_view text;
  double number = 0;
  std::string str;
  Span span;
  bool newline_before = false;
  std::vector<std::pair<Span, std::string>> comments;
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool ident_part(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      Token t;
      skip_space(t);
      t.span.begin = static_cast<std::uint32_t>(pos_);
      t.span.line = line_;
      t.span.column = col();
      if (pos_ >= src_.size()) {
        t.type = Tok::End;
        t.span.end = t.span.begin;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[pos_];
      if (ident_start(c)) {
        std::size_t s = pos_;
        while (pos_ < src_.size() && ident_part(src_[pos_])) ++pos_;
        t.type = Tok::Ident;
        t.text = src_.substr(s, pos_ - s);
      } else if ((c >= '0' && c <= '9') || (c == '.' && pos_ + 1 < src_.size() && isdigit(src_[pos_ + 1]))) {
        lex_number(t);
      } else if (c == '"' || c == '\'') {
        lex_string(t, c);
      } else {
        lex_punct(t);
      }
      t.span.end = static_cast<std::uint32_t>(pos_);
      out.push_back(std::move(t));
    }
  }

 private:
  static bool isdigit(char c) { return c >= '0' && c <= '9'; }

  std::uint32_t col() const { return static_cast<std::uint32_t>(pos_ - line_start_) + 1; }

  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError({line_, col()}, msg); }

  void newline() {
    ++line_;
    line_start_ = pos_ + 1;
  }

  void skip_space(Token& t) {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        t.newline_before = true;
        newline();
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        Span sp{static_cast<std::uint32_t>(pos_), 0, line_, col()};
        std::size_t s = pos_;
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        sp.end = static_cast<std::uint32_t>(pos_);
        t.comments.emplace_back(sp, std::string(src_.substr(s, pos_ - s)));
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        Span sp{static_cast<std::uint32_t>(pos_), 0, line_, col()};
        std::size_t s = pos_;
        pos_ += 2;
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
          if (src_[pos_] == '\n') {
            t.newline_before = true;
            newline();
          }
          ++pos_;
        }
        if (pos_ + 1 >= src_.size()) fail("unterminated comment");
        pos_ += 2;
        sp.end = static_cast<std::uint32_t>(pos_);
        t.comments.emplace_back(sp, std::string(src_.substr(s, pos_ - s)));
      } else {
        break;
      }
    }
  }

  void lex_number(Token& t) {
    std::size_t s = pos_;
    while (pos_ < src_.size() && isdigit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && isdigit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && isdigit(src_[pos_])) {
        while (pos_ < src_.size() && isdigit(src_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    if (pos_ < src_.size() && ident_start(src_[pos_])) fail("invalid number literal");
    t.type = Tok::Number;
    t.text = src_.substr(s, pos_ - s);
    std::string buf(t.text);
    t.number = std::strtod(buf.c_str(), nullptr);
  }

  void lex_string(Token& t, char quote) {
    std::size_t s = pos_++;
    std::string out;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated string");
      char c = src_[pos_++];
      if (c == quote) break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= src_.size()) fail("unterminated string");
      char e = src_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '0': out += '\0'; break;
        case 'u': {
          if (pos_ + 4 > src_.size()) fail("bad unicode escape");
          unsigned cp = 0;
          auto [p, ec] = std::from_chars(src_.data() + pos_, src_.data() + pos_ + 4, cp, 16);
          if (ec != std::errc() || p != src_.data() + pos_ + 4) fail("bad unicode escape");
          pos_ += 4;
          append_utf8(out, cp);
          break;
        }
        case '\n':
          newline();
          break;
        default: out += e;
      }
    }
    t.type = Tok::String;
    t.text = src_.substr(s, pos_ - s);
    t.str = std::move(out);
  }

  void lex_punct(Token& t) {
    static const std::array<std::string_view, 33> puncts = {
        "===", "!==", "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "{",
        "}",   "(",   ")",  "[",  "]",  ";",  ",",  ".",  ":",  "?",  "=",  "<",  ">",  "+",  "-",  "*"};
    static const std::array<std::string_view, 3> more = {"/", "%", "!"};
    std::string_view rest = src_.substr(pos_);
    for (auto p : puncts) {
      if (rest.substr(0, p.size()) == p) {
        t.type = Tok::Punct;
        t.text = rest.substr(0, p.size());
        pos_ += p.size();
        return;
      }
    }
    for (auto p : more) {
      if (rest.substr(0, p.size()) == p) {
        t.type = Tok::Punct;
        t.text = rest.substr(0, p.size());
        pos_ += p.size();
        return;
      }
    }
    fail(std::string("unexpected character '") + src_[pos_] + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::size_t line_start_ = 0;
};

const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> k = {
      "let",  "var",   "const", "signal", "function", "class", "new", "return", "if",   "else",
      "while", "for", "true",  "false",  "nil",      "null",  "undefined"};
  return k;
}

struct ScopeInfo {
  std::vector<Symbol> names;
  std::shared_ptr<ScopeInfo> parent;
  bool binds_this = false;
};

class Parser {
 public:
  Parser(std::shared_ptr<const std::string> src) : src_(std::move(src)) {}

  ProgramPtr run() {
    toks_ = Lexer(*src_).run();
    auto prog = std::make_shared<Program>();
    prog->source = src_;
    if (toks_.size() >= 2 && toks_[0].type == Tok::String && toks_[0].str == kHooksMarker) hooked_ = true;
    prog->hooked = hooked_;
    auto root = make(NodeKind::Program, cur().span);
    scope_ = std::make_shared<ScopeInfo>();
    statements(*root, [&] { return cur().type == Tok::End; });
    root->span.end = static_cast<std::uint32_t>(src_->size());
    resolve_sites();
    prog->root = std::move(root);
    prog->node_count = next_id_;
    return prog;
  }

 private:
  // --- token helpers ---
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
  bool is(std::string_view p) const {
    const Token& t = cur();
    return (t.type == Tok::Punct || t.type == Tok::Ident) && t.text == p;
  }
  bool is_punct(std::string_view p) const { return cur().type == Tok::Punct && cur().text == p; }
  bool accept(std::string_view p) {
    if (is_punct(p)) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_kw(std::string_view k) {
    if (cur().type == Tok::Ident && cur().text == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(cur().span.pos(), msg); }
  [[noreturn]] void unexpected() const {
    if (cur().type == Tok::End) fail("unexpected end of input");
    fail("unexpected token '" + std::string(cur().text) + "'");
  }
  void expect(std::string_view p) {
    if (!accept(p)) {
      if (cur().type == Tok::End) fail("expected '" + std::string(p) + "' but reached end of input");
      fail("expected '" + std::string(p) + "' but found '" + std::string(cur().text) + "'");
    }
  }
  void semicolon() {
    if (accept(";")) return;
    if (is_punct("}") || cur().type == Tok::End || cur().newline_before) return;
    unexpected();
  }

  NodePtr make(NodeKind k, const Span& sp) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->id = next_id_++;
    n->span = sp;
    return n;
  }
  void finish(Node& n) {
    if (pos_ > 0) n.span.end = toks_[pos_ - 1].span.end;
  }

  Symbol binding_name() {
    const Token& t = cur();
    if (t.type != Tok::Ident || keywords().count(t.text)) unexpected();
    check_reserved(t.text);
    ++pos_;
    return intern(t.text);
  }

  void check_reserved(std::string_view name) const {
    if (!hooked_ && is_reserved_name(name)) {
      fail("identifier '" + std::string(name) + "' is reserved");
    }
  }

  void declare(Symbol s) {
    auto& names = scope_->names;
    if (std::find(names.begin(), names.end(), s) == names.end()) names.push_back(s);
  }

  void push_scope(bool binds_this = false) {
    auto s = std::make_shared<ScopeInfo>();
    s->parent = scope_;
    s->binds_this = binds_this;
    scope_ = s;
  }
  void pop_scope() { scope_ = scope_->parent; }

  void resolve_sites() {
    for (auto& [node, info] : sites_) {
      std::vector<Symbol> names;
      bool this_seen = false;
      for (auto s = info; s; s = s->parent) {
        if (s->binds_this && !this_seen) {
          this_seen = true;
          names.push_back(sym::this_());
        }
        for (Symbol n : s->names) {
          if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
        }
      }
      node->locals = std::move(names);
    }
  }

  // --- statements ---
  template <class Done>
  void statements(Node& parent, Done done) {
    while (true) {
      flush_comments(parent);
      if (done()) break;
      parent.children.push_back(statement());
    }
  }

  void flush_comments(Node& parent) {
    auto& t = toks_[pos_];
    for (auto& [sp, text] : t.comments) {
      auto c = make(NodeKind::Comment, sp);
      c->text = text;
      parent.children.push_back(std::move(c));
    }
    t.comments.clear();
  }

  NodePtr statement() {
    const Token& t = cur();
    if (t.type == Tok::Ident) {
      if (t.text == "let" || t.text == "var" || t.text == "const") return var_decl();
      if (t.text == "signal" && peek().type == Tok::Ident) return signal_decl();
      if (t.text == "function" && peek().type == Tok::Ident) return function_decl();
      if (t.text == "class") return class_decl();
      if (t.text == "if") return if_stmt();
      if (t.text == "while") return while_stmt();
      if (t.text == "for") return for_of();
      if (t.text == "return") return return_stmt();
      if (peek().type == Tok::Punct && peek().text == ":" && !keywords().count(t.text)) return labeled();
    }
    if (is_punct("{")) return block();
    if (accept(";")) {
      auto b = make(NodeKind::Block, t.span);
      finish(*b);
      return b;
    }
    auto s = make(NodeKind::ExprStmt, t.span);
    s->children.push_back(expression());
    semicolon();
    finish(*s);
    return s;
  }

  NodePtr var_decl() {
    auto n = make(NodeKind::VarDecl, cur().span);
    if (cur().text == "var") n->flags |= flag::kVar;
    if (cur().text == "const") n->flags |= flag::kConst;
    ++pos_;
    do {
      auto id = make(NodeKind::Ident, cur().span);
      id->symbol = binding_name();
      if (accept("=")) id->children.push_back(assignment());
      finish(*id);
      declare(id->symbol);
      n->children.push_back(std::move(id));
    } while (accept(","));
    semicolon();
    finish(*n);
    return n;
  }

  NodePtr signal_decl() {
    auto n = make(NodeKind::SignalDecl, cur().span);
    ++pos_;
    n->symbol = binding_name();
    expect("=");
    n->children.push_back(expression());
    declare(n->symbol);
    semicolon();
    finish(*n);
    return n;
  }

  NodePtr function_decl() {
    Span sp = cur().span;
    ++pos_;
    Symbol name = binding_name();
    declare(name);
    auto fn = function_rest(sp, false);
    fn->symbol = name;
    fn->flags |= flag::kDeclaration;
    return fn;
  }

  // Parses "(params) { body }" into a FunctionLit.
  NodePtr function_rest(const Span& sp, bool method) {
    auto fn = make(NodeKind::FunctionLit, sp);
    if (method) fn->flags |= flag::kMethod;
    push_scope(true);
    expect("(");
    params(*fn);
    fn->children.push_back(block_in_current_scope());
    pop_scope();
    finish(*fn);
    return fn;
  }

  void params(Node& fn) {
    if (!accept(")")) {
      do {
        auto p = make(NodeKind::Ident, cur().span);
        p->symbol = binding_name();
        finish(*p);
        declare(p->symbol);
        fn.children.push_back(std::move(p));
      } while (accept(","));
      expect(")");
    }
  }

  NodePtr class_decl() {
    auto n = make(NodeKind::ClassDecl, cur().span);
    ++pos_;
    n->symbol = binding_name();
    declare(n->symbol);
    expect("{");
    while (!accept("}")) {
      if (accept(";")) continue;
      Span sp = cur().span;
      if (cur().type != Tok::Ident) unexpected();
      Symbol name = intern(cur().text);
      ++pos_;
      auto m = function_rest(sp, true);
      m->symbol = name;
      n->children.push_back(std::move(m));
    }
    finish(*n);
    return n;
  }

  NodePtr if_stmt() {
    auto n = make(NodeKind::If, cur().span);
    ++pos_;
    expect("(");
    n->children.push_back(expression());
    expect(")");
    n->children.push_back(sub_statement());
    if (accept_kw("else")) n->children.push_back(sub_statement());
    finish(*n);
    return n;
  }

  NodePtr while_stmt() {
    auto n = make(NodeKind::While, cur().span);
    ++pos_;
    expect("(");
    n->children.push_back(expression());
    expect(")");
    n->children.push_back(sub_statement());
    finish(*n);
    return n;
  }

  // Body of if/while: declarations inside a bare statement get a block.
  NodePtr sub_statement() {
    if (cur().type == Tok::Ident &&
        (cur().text == "let" || cur().text == "var" || cur().text == "const" || cur().text == "class" ||
         (cur().text == "function" && peek().type == Tok::Ident))) {
      auto b = make(NodeKind::Block, cur().span);
      push_scope();
      b->children.push_back(statement());
      b->flags |= flag::kScoped;
      pop_scope();
      finish(*b);
      return b;
    }
    return statement();
  }

  NodePtr for_of() {
    auto n = make(NodeKind::ForOf, cur().span);
    ++pos_;
    expect("(");
    if (!(accept_kw("let") || accept_kw("const") || accept_kw("var"))) fail("expected 'let' in for-of");
    Symbol var = binding_name();
    n->symbol = var;
    if (!accept_kw("of")) fail("expected 'of'");
    n->children.push_back(expression());
    expect(")");
    push_scope();
    declare(var);
    if (is_punct("{")) {
      n->children.push_back(block_in_current_scope());
    } else {
      auto b = make(NodeKind::Block, cur().span);
      b->children.push_back(statement());
      finish(*b);
      n->children.push_back(std::move(b));
    }
    pop_scope();
    finish(*n);
    return n;
  }

  NodePtr return_stmt() {
    auto n = make(NodeKind::Return, cur().span);
    ++pos_;
    if (!(is_punct(";") || is_punct("}") || cur().type == Tok::End || cur().newline_before)) {
      n->children.push_back(expression());
    }
    semicolon();
    finish(*n);
    return n;
  }

  NodePtr labeled() {
    Span sp = cur().span;
    std::string_view label = cur().text;
    pos_ += 2;
    if (label == "always") {
      auto n = make(NodeKind::AlwaysStmt, sp);
      n->children.push_back(expression());
      semicolon();
      finish(*n);
      return n;
    }
    check_reserved(label);
    auto n = make(NodeKind::Label, sp);
    n->symbol = intern(label);
    n->children.push_back(statement());
    finish(*n);
    return n;
  }

  NodePtr block() {
    push_scope();
    auto b = block_in_current_scope();
    if (!scope_->names.empty()) b->flags |= flag::kScoped;
    pop_scope();
    return b;
  }

  NodePtr block_in_current_scope() {
    auto b = make(NodeKind::Block, cur().span);
    expect("{");
    statements(*b, [&] { return is_punct("}") || cur().type == Tok::End; });
    expect("}");
    finish(*b);
    return b;
  }

  // --- expressions ---
  NodePtr expression() { return assignment(); }

  bool arrow_ahead() const {
    if (cur().type == Tok::Ident && !keywords().count(cur().text) && peek().type == Tok::Punct &&
        peek().text == "=>") {
      return true;
    }
    if (!is_punct("(")) return false;
    int depth = 0;
    for (std::size_t i = pos_; i < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.type == Tok::End) return false;
      if (t.type != Tok::Punct) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (--depth == 0) {
          const Token& n = toks_[i + 1];
          return n.type == Tok::Punct && n.text == "=>";
        }
      }
    }
    return false;
  }

  NodePtr arrow() {
    auto fn = make(NodeKind::FunctionLit, cur().span);
    fn->flags |= flag::kArrow;
    push_scope(false);
    if (accept("(")) {
      params(*fn);
    } else {
      auto p = make(NodeKind::Ident, cur().span);
      p->symbol = binding_name();
      finish(*p);
      declare(p->symbol);
      fn->children.push_back(std::move(p));
    }
    expect("=>");
    if (is_punct("{")) {
      fn->children.push_back(block_in_current_scope());
    } else {
      fn->flags |= flag::kExprBody;
      fn->children.push_back(assignment());
    }
    pop_scope();
    finish(*fn);
    return fn;
  }

  static Op assign_op(std::string_view t) {
    if (t == "+=") return Op::Add;
    if (t == "-=") return Op::Sub;
    if (t == "*=") return Op::Mul;
    if (t == "/=") return Op::Div;
    if (t == "%=") return Op::Mod;
    return Op::None;
  }

  NodePtr assignment() {
    if (arrow_ahead()) return arrow();
    Span sp = cur().span;
    auto lhs = conditional();
    if (cur().type == Tok::Punct &&
        (cur().text == "=" || cur().text == "+=" || cur().text == "-=" || cur().text == "*=" ||
         cur().text == "/=" || cur().text == "%=")) {
      if (lhs->kind != NodeKind::Ident && lhs->kind != NodeKind::Member && lhs->kind != NodeKind::Index) {
        fail("invalid assignment target");
      }
      Op op = assign_op(cur().text);
      ++pos_;
      auto n = make(NodeKind::Assign, sp);
      n->op = op;
      n->children.push_back(std::move(lhs));
      n->children.push_back(assignment());
      finish(*n);
      return n;
    }
    return lhs;
  }

  NodePtr conditional() {
    Span sp = cur().span;
    auto c = binary(0);
    if (accept("?")) {
      auto n = make(NodeKind::Conditional, sp);
      n->children.push_back(std::move(c));
      n->children.push_back(assignment());
      expect(":");
      n->children.push_back(assignment());
      finish(*n);
      return n;
    }
    return c;
  }

  static int binary_prec(const Token& t, Op& op) {
    if (t.type != Tok::Punct) return -1;
    auto s = t.text;
    if (s == "||") return op = Op::Or, 1;
    if (s == "&&") return op = Op::And, 2;
    if (s == "==") return op = Op::Eq, 3;
    if (s == "!=") return op = Op::Ne, 3;
    if (s == "===") return op = Op::StrictEq, 3;
    if (s == "!==") return op = Op::StrictNe, 3;
    if (s == "<") return op = Op::Lt, 4;
    if (s == "<=") return op = Op::Le, 4;
    if (s == ">") return op = Op::Gt, 4;
    if (s == ">=") return op = Op::Ge, 4;
    if (s == "+") return op = Op::Add, 5;
    if (s == "-") return op = Op::Sub, 5;
    if (s == "*") return op = Op::Mul, 6;
    if (s == "/") return op = Op::Div, 6;
    if (s == "%") return op = Op::Mod, 6;
    return -1;
  }

  NodePtr binary(int min) {
    Span sp = cur().span;
    auto lhs = unary();
    while (true) {
      Op op = Op::None;
      int p = binary_prec(cur(), op);
      if (p < 0 || p < min) break;
      ++pos_;
      auto rhs = binary(p + 1);
      auto n = make(NodeKind::Binary, sp);
      n->op = op;
      n->children.push_back(std::move(lhs));
      n->children.push_back(std::move(rhs));
      finish(*n);
      lhs = std::move(n);
    }
    return lhs;
  }

  NodePtr unary() {
    Span sp = cur().span;
    if (cur().type == Tok::Punct) {
      auto t = cur().text;
      if (t == "!" || t == "-" || t == "+") {
        ++pos_;
        auto n = make(NodeKind::Unary, sp);
        n->op = t == "!" ? Op::Not : (t == "-" ? Op::Neg : Op::Plus);
        n->children.push_back(unary());
        finish(*n);
        return n;
      }
      if (t == "++" || t == "--") {
        ++pos_;
        auto n = make(NodeKind::Update, sp);
        n->op = t == "++" ? Op::Inc : Op::Dec;
        n->flags |= flag::kPrefix;
        auto target = unary();
        check_update_target(*target);
        n->children.push_back(std::move(target));
        finish(*n);
        return n;
      }
    }
    return postfix();
  }

  void check_update_target(const Node& n) const {
    if (n.kind != NodeKind::Ident && n.kind != NodeKind::Member && n.kind != NodeKind::Index) {
      fail("invalid update target");
    }
  }

  NodePtr postfix() {
    Span sp = cur().span;
    auto e = call_member();
    if (cur().type == Tok::Punct && (cur().text == "++" || cur().text == "--") && !cur().newline_before) {
      check_update_target(*e);
      auto n = make(NodeKind::Update, sp);
      n->op = cur().text == "++" ? Op::Inc : Op::Dec;
      ++pos_;
      n->children.push_back(std::move(e));
      finish(*n);
      return n;
    }
    return e;
  }

  void arguments(Node& n) {
    expect("(");
    if (!accept(")")) {
      do {
        n.children.push_back(assignment());
      } while (accept(","));
      expect(")");
    }
  }

  NodePtr member_name(NodePtr obj, const Span& sp) {
    if (cur().type != Tok::Ident) unexpected();
    auto m = make(NodeKind::Member, sp);
    m->symbol = intern(cur().text);
    m->key = PropKey::name(m->symbol);
    ++pos_;
    m->children.push_back(std::move(obj));
    finish(*m);
    return m;
  }

  NodePtr call_member() {
    Span sp = cur().span;
    NodePtr e;
    if (accept_kw("new")) {
      auto n = make(NodeKind::New, sp);
      NodePtr callee = primary();
      while (true) {
        if (accept(".")) {
          callee = member_name(std::move(callee), sp);
        } else if (is_punct("[")) {
          ++pos_;
          auto ix = make(NodeKind::Index, sp);
          ix->children.push_back(std::move(callee));
          ix->children.push_back(expression());
          expect("]");
          finish(*ix);
          callee = std::move(ix);
        } else {
          break;
        }
      }
      n->children.push_back(std::move(callee));
      if (is_punct("(")) arguments(*n);
      finish(*n);
      e = std::move(n);
    } else {
      e = primary();
    }
    while (true) {
      if (accept(".")) {
        e = member_name(std::move(e), sp);
      } else if (is_punct("[")) {
        ++pos_;
        auto ix = make(NodeKind::Index, sp);
        ix->children.push_back(std::move(e));
        ix->children.push_back(expression());
        expect("]");
        finish(*ix);
        e = std::move(ix);
      } else if (is_punct("(")) {
        auto c = make(NodeKind::Call, sp);
        bool site = e->kind == NodeKind::Ident && symbol_text(e->symbol) == "aexpr";
        c->children.push_back(std::move(e));
        arguments(*c);
        finish(*c);
        if (site) {
          c->flags |= flag::kAexprSite;
          sites_.emplace_back(c.get(), scope_);
        }
        e = std::move(c);
      } else {
        break;
      }
    }
    return e;
  }

  NodePtr primary() {
    const Token& t = cur();
    Span sp = t.span;
    switch (t.type) {
      case Tok::Number: {
        auto n = make(NodeKind::Literal, sp);
        n->literal = LiteralKind::Number;
        n->number = t.number;
        ++pos_;
        finish(*n);
        return n;
      }
      case Tok::String: {
        auto n = make(NodeKind::Literal, sp);
        n->literal = LiteralKind::String;
        n->symbol = intern(t.str);
        ++pos_;
        finish(*n);
        return n;
      }
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false" || t.text == "nil" || t.text == "null" ||
            t.text == "undefined") {
          auto n = make(NodeKind::Literal, sp);
          n->literal = t.text == "true" ? LiteralKind::True : (t.text == "false" ? LiteralKind::False : LiteralKind::Nil);
          ++pos_;
          finish(*n);
          return n;
        }
        if (t.text == "function") {
          ++pos_;
          Symbol name = 0;
          if (cur().type == Tok::Ident && !is_punct("(")) name = binding_name();
          auto fn = function_rest(sp, false);
          fn->symbol = name;
          return fn;
        }
        if (keywords().count(t.text)) unexpected();
        check_reserved(t.text);
        auto n = make(NodeKind::Ident, sp);
        n->symbol = intern(t.text);
        ++pos_;
        finish(*n);
        return n;
      }
      case Tok::Punct:
        if (t.text == "(") {
          ++pos_;
          auto e = expression();
          expect(")");
          return e;
        }
        if (t.text == "[") return array_lit();
        if (t.text == "{") return object_lit();
        unexpected();
      case Tok::End: unexpected();
    }
    unexpected();
  }

  NodePtr array_lit() {
    auto n = make(NodeKind::ArrayLit, cur().span);
    expect("[");
    while (!accept("]")) {
      n->children.push_back(assignment());
      if (!accept(",")) {
        expect("]");
        break;
      }
    }
    finish(*n);
    return n;
  }

  NodePtr object_lit() {
    auto n = make(NodeKind::ObjectLit, cur().span);
    expect("{");
    while (!accept("}")) {
      Span sp = cur().span;
      Symbol key;
      bool ident_key = cur().type == Tok::Ident;
      if (cur().type == Tok::Ident) {
        key = intern(cur().text);
      } else if (cur().type == Tok::String) {
        key = intern(cur().str);
      } else if (cur().type == Tok::Number) {
        key = intern(number_to_string(cur().number));
      } else {
        unexpected();
      }
      ++pos_;
      auto prop = make(NodeKind::Property, sp);
      prop->symbol = key;
      if (is_punct("(")) {
        auto m = function_rest(sp, true);
        m->symbol = key;
        prop->children.push_back(std::move(m));
      } else if (accept(":")) {
        prop->children.push_back(assignment());
      } else if (ident_key) {
        check_reserved(symbol_text(key));
        auto id = make(NodeKind::Ident, sp);
        id->symbol = key;
        finish(*id);
        prop->children.push_back(std::move(id));
      } else {
        unexpected();
      }
      finish(*prop);
      n->children.push_back(std::move(prop));
      if (!accept(",")) {
        expect("}");
        break;
      }
    }
    finish(*n);
    return n;
  }

  std::shared_ptr<const std::string> src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::uint32_t next_id_ = 0;
  bool hooked_ = false;
  std::shared_ptr<ScopeInfo> scope_;
  std::vector<std::pair<Node*, std::shared_ptr<ScopeInfo>>> sites_;
};

}  // namespace

ProgramPtr parse(std::string source) { return parse_shared(std::make_shared<const std::string>(std::move(source))); }

ProgramPtr parse_shared(std::shared_ptr<const std::string> source) { return Parser(std::move(source)).run(); }

}  // namespace rxl
