#include "dsx/synth.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "dsx/error.hpp"

namespace dsx {
namespace {

constexpr std::array kWords = {
    "count", "size", "index", "value", "result", "node", "item", "list",
    "total", "offset", "buffer", "name", "key", "data", "flag", "state",
    "limit", "width", "height", "left", "right", "next", "prev", "head",
    "tail", "depth", "score", "cache", "config", "path", "line", "token",
    "user", "point", "delta", "ratio", "step", "mode", "level", "range"};
constexpr std::array kSuffixes = {"", "Count", "Id", "Max", "Min", "Old", "New",
                                  "Len", "Ptr", "Tmp"};
constexpr std::array kVerbs = {
    "get", "set", "update", "check", "is", "compute", "find", "load", "save",
    "add", "remove", "parse", "read", "write", "init", "reset", "apply",
    "build", "make", "emit", "run", "send", "close", "open", "clear"};
constexpr std::array kTypes = {"int", "bool", "String", "long", "Node",
                               "List", "Map", "double", "Point", "Config"};
constexpr std::array kStrings = {"\"\"", "\"ok\"", "\"error\"", "\"name\"",
                                 "\"id\"", "\"x\"", "\"default\""};
constexpr std::array kBinary = {"+", "-", "*", "/", "%", "<", ">", "<=",
                                ">=", "==", "!=", "&&", "||"};
constexpr std::array kCompare = {"<", ">", "<=", ">=", "==", "!="};

// Zipf-like pick over a pool of `n` entries.
class Skewed {
 public:
  Skewed(std::size_t n, double s) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(double(i + 1), s);
    dist_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }
  std::size_t operator()(std::mt19937_64& rng) { return dist_(rng); }

 private:
  std::discrete_distribution<std::size_t> dist_;
};

struct Expr {
  enum Kind { kId, kLit, kCall, kMember, kBinary, kUnary, kParen } kind = kId;
  std::string text;  // identifier / literal / operator / callee
  std::vector<Expr> kids;
};

std::string render(const Expr& e) {
  switch (e.kind) {
    case Expr::kId:
    case Expr::kLit:
      return e.text;
    case Expr::kCall: {
      std::string s = e.kids.empty() ? e.text : render(e.kids[0]);
      s += "(";
      for (std::size_t i = 1; i < e.kids.size(); ++i) {
        if (i > 1) s += ", ";
        s += render(e.kids[i]);
      }
      return s + ")";
    }
    case Expr::kMember:
      return render(e.kids[0]) + "." + e.text;
    case Expr::kBinary:
      return render(e.kids[0]) + " " + e.text + " " + render(e.kids[1]);
    case Expr::kUnary:
      return e.text + render(e.kids[0]);
    case Expr::kParen:
      return "(" + render(e.kids[0]) + ")";
  }
  return {};
}

struct Stmt {
  enum Kind { kDecl, kAssign, kCall, kReturn, kIf, kWhile, kClose } kind = kCall;
  std::string type;
  std::string target;
  std::string op = "=";
  Expr e;
};

std::string render(const Stmt& s) {
  switch (s.kind) {
    case Stmt::kDecl: return s.type + " " + s.target + " = " + render(s.e) + ";";
    case Stmt::kAssign: return s.target + " " + s.op + " " + render(s.e) + ";";
    case Stmt::kCall: return render(s.e) + ";";
    case Stmt::kReturn: return "return " + render(s.e) + ";";
    case Stmt::kIf: return "if (" + render(s.e) + ") {";
    case Stmt::kWhile: return "while (" + render(s.e) + ") {";
    case Stmt::kClose: return "}";
  }
  return {};
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed)
      : rng_(seed),
        vars_(kWords.size() * kSuffixes.size(), 1.05),
        funcs_(kVerbs.size() * kWords.size(), 1.0),
        types_(kTypes.size(), 1.2),
        small_(10, 1.3) {}

  CodeChange change() {
    std::vector<Stmt> before;
    std::size_t n = pick({6, 3, 1}) + 1;
    for (std::size_t i = 0; i < n; ++i) before.push_back(statement());
    // Nesting openers only at the start, closers only at the end.
    for (std::size_t i = 1; i < before.size(); ++i) {
      if (before[i].kind == Stmt::kIf || before[i].kind == Stmt::kWhile) {
        before[i] = simple_statement();
      }
    }
    CodeChange c;
    switch (pick({80, 7, 7, 6})) {
      case 0: {
        std::vector<Stmt> after = before;
        std::size_t edits = pick({3, 1}) + 1;
        for (std::size_t i = 0; i < edits; ++i) edit(after);
        c.old_lines = lines(before);
        c.new_lines = lines(after);
        break;
      }
      case 1:
        c.new_lines = lines(before);
        break;
      case 2:
        c.old_lines = lines(before);
        break;
      default: {
        std::vector<Stmt> after;
        for (std::size_t i = 0; i < n; ++i) after.push_back(statement());
        c.old_lines = lines(before);
        c.new_lines = lines(after);
        break;
      }
    }
    return c;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::size_t pick(std::initializer_list<double> weights) {
    std::discrete_distribution<std::size_t> d(weights);
    return d(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string var() {
    std::size_t i = vars_(rng_);
    return std::string(kWords[i % kWords.size()]) +
           kSuffixes[(i / kWords.size()) % kSuffixes.size()];
  }
  std::string func() {
    std::size_t i = funcs_(rng_);
    std::string w = kWords[(i / kVerbs.size()) % kWords.size()];
    w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return std::string(kVerbs[i % kVerbs.size()]) + w;
  }
  std::string type() { return kTypes[types_(rng_)]; }
  std::string literal() {
    switch (pick({6, 2, 1})) {
      case 0: return std::to_string(small_(rng_));
      case 1: return kStrings[std::uniform_int_distribution<std::size_t>(
          0, kStrings.size() - 1)(rng_)];
      default: return chance(0.5) ? "true" : "false";
    }
  }

  Expr id() { return {Expr::kId, var(), {}}; }
  Expr lit() { return {Expr::kLit, literal(), {}}; }

  Expr call(int depth) {
    Expr e{Expr::kCall, func(), {}};
    if (chance(0.3)) {
      // Method call: receiver.method(args)
      e.kids.push_back({Expr::kMember, func(), {id()}});
    } else {
      e.kids.push_back({Expr::kId, e.text, {}});
    }
    std::size_t args = pick({3, 4, 3, 1});
    for (std::size_t i = 0; i < args; ++i) e.kids.push_back(expr(depth + 1));
    return e;
  }

  Expr expr(int depth = 0) {
    if (depth >= 2) return chance(0.7) ? id() : lit();
    switch (pick({10, 5, 5, 2, 4, 1, 1})) {
      case 0: return id();
      case 1: return lit();
      case 2: return call(depth);
      case 3: return {Expr::kMember, var(), {id()}};
      case 4: {
        const char* op = kBinary[std::uniform_int_distribution<std::size_t>(
            0, kBinary.size() - 1)(rng_)];
        return {Expr::kBinary, op, {expr(depth + 1), operand(depth + 1)}};
      }
      case 5: return {Expr::kUnary, chance(0.5) ? "!" : "-", {operand(depth + 1)}};
      default: return {Expr::kParen, "", {binary(depth + 1)}};
    }
  }

  // Keeps generated text parsing back to the same shape: operands of an
  // operator are never bare binary expressions.
  Expr operand(int depth) {
    Expr e = expr(depth);
    if (e.kind == Expr::kBinary) return {Expr::kParen, "", {e}};
    return e;
  }
  Expr binary(int depth) {
    return {Expr::kBinary, "+", {id(), operand(depth + 1)}};
  }
  Expr condition() {
    if (chance(0.5)) {
      const char* op = kCompare[std::uniform_int_distribution<std::size_t>(
          0, kCompare.size() - 1)(rng_)];
      return {Expr::kBinary, op, {chance(0.7) ? id() : call(1), chance(0.6) ? lit() : id()}};
    }
    if (chance(0.5)) return call(0);
    return {Expr::kUnary, "!", {chance(0.5) ? id() : call(1)}};
  }

  Stmt simple_statement() {
    Stmt s;
    switch (pick({3, 4, 5, 1})) {
      case 0:
        s.kind = Stmt::kDecl;
        s.type = type();
        s.target = var();
        s.e = expr();
        break;
      case 1:
        s.kind = Stmt::kAssign;
        s.target = var();
        s.op = pick({6, 1, 1}) == 0 ? "=" : (chance(0.5) ? "+=" : "-=");
        s.e = expr();
        break;
      case 2:
        s.kind = Stmt::kCall;
        s.e = call(0);
        break;
      default:
        s.kind = Stmt::kReturn;
        s.e = expr();
        break;
    }
    return s;
  }

  Stmt statement() {
    switch (pick({14, 2, 1, 1})) {
      case 1: return {Stmt::kIf, "", "", "=", condition()};
      case 2: return {Stmt::kWhile, "", "", "=", condition()};
      case 3: return {Stmt::kClose, "", "", "=", {}};
      default: return simple_statement();
    }
  }

  // Picks a random subexpression (preorder position) of `e`.
  Expr* subexpr(Expr& e) {
    std::vector<Expr*> all;
    std::vector<Expr*> stack{&e};
    while (!stack.empty()) {
      Expr* x = stack.back();
      stack.pop_back();
      all.push_back(x);
      for (auto& k : x->kids) stack.push_back(&k);
    }
    return all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng_)];
  }

  void edit_expr(Expr& root) {
    Expr* e = subexpr(root);
    switch (pick({4, 4, 3, 2, 2, 2, 1, 1})) {
      case 0:  // literal
        if (e->kind == Expr::kLit) {
          e->text = literal();
        } else {
          *e = lit();
        }
        break;
      case 1:  // rename
        if (e->kind == Expr::kId) {
          e->text = var();
        } else if (e->kind == Expr::kCall && e->kids[0].kind == Expr::kId) {
          e->kids[0].text = func();
        } else if (e->kind == Expr::kMember) {
          e->text = chance(0.5) ? func() : var();
        } else {
          *e = id();
        }
        break;
      case 2:  // swap / add / remove argument
        if (e->kind == Expr::kCall && e->kids.size() >= 3 && chance(0.5)) {
          std::swap(e->kids[1], e->kids[2]);
        } else if (e->kind == Expr::kCall && e->kids.size() >= 2 && chance(0.5)) {
          e->kids.pop_back();
        } else if (e->kind == Expr::kCall) {
          e->kids.push_back(expr(1));
        } else {
          *e = call(1);
        }
        break;
      case 3:  // operator
        if (e->kind == Expr::kBinary) {
          e->text = kBinary[std::uniform_int_distribution<std::size_t>(
              0, kBinary.size() - 1)(rng_)];
        } else {
          *e = {Expr::kBinary, "+", {operand(1), lit()}};
        }
        break;
      case 4:  // wrap in a call
        *e = Expr{Expr::kCall, "", {{Expr::kId, func(), {}}, *e}};
        break;
      case 5:  // negate
        *e = Expr{Expr::kUnary, "!", {e->kind == Expr::kBinary ? Expr{Expr::kParen, "", {*e}} : *e}};
        break;
      case 6:  // parenthesize / unwrap
        if (e->kind == Expr::kParen) {
          Expr inner = e->kids[0];
          *e = inner;
        } else if (e->kind == Expr::kBinary) {
          *e = Expr{Expr::kParen, "", {*e}};
        } else {
          *e = id();
        }
        break;
      default:
        *e = expr(1);
        break;
    }
  }

  void edit(std::vector<Stmt>& stmts) {
    std::size_t at = std::uniform_int_distribution<std::size_t>(0, stmts.size() - 1)(rng_);
    Stmt& s = stmts[at];
    switch (pick({12, 1, 1, 1, 1})) {
      case 0:
        if (s.kind == Stmt::kClose) {
          stmts.insert(stmts.begin() + static_cast<std::ptrdiff_t>(at), simple_statement());
        } else if ((s.kind == Stmt::kAssign) && chance(0.15)) {
          s.op = s.op == "=" ? "+=" : "=";
        } else if (s.kind == Stmt::kDecl && chance(0.1)) {
          s.type = type();
        } else if (s.kind == Stmt::kAssign && chance(0.1)) {
          s.target = var();
        } else {
          edit_expr(s.e);
        }
        break;
      case 1:  // insert
        stmts.insert(stmts.begin() + static_cast<std::ptrdiff_t>(at + 1), simple_statement());
        break;
      case 2:  // delete
        if (stmts.size() > 1) {
          stmts.erase(stmts.begin() + static_cast<std::ptrdiff_t>(at));
        } else {
          edit_expr(s.e);
        }
        break;
      case 3:  // replace
        if (s.kind != Stmt::kIf && s.kind != Stmt::kWhile) s = simple_statement();
        else s.e = condition();
        break;
      default:  // call result into a variable
        if (s.kind == Stmt::kCall) {
          Stmt d{Stmt::kDecl, type(), var(), "=", s.e};
          s = d;
        } else {
          edit_expr(s.e);
        }
        break;
    }
  }

  std::vector<std::string> lines(const std::vector<Stmt>& stmts) {
    std::vector<std::string> out;
    int indent = 0;
    for (const auto& s : stmts) {
      if (s.kind == Stmt::kClose && indent > 0) --indent;
      out.push_back(std::string(2 * static_cast<std::size_t>(indent), ' ') + render(s));
      if (s.kind == Stmt::kIf || s.kind == Stmt::kWhile) ++indent;
    }
    return out;
  }

  std::mt19937_64 rng_;
  Skewed vars_;
  Skewed funcs_;
  Skewed types_;
  Skewed small_;
};

const char* kRepos[] = {"core", "util", "net", "ui", "storage"};

}  // namespace

std::vector<CodeChange> synthesize_changes(std::size_t n, std::uint64_t seed) {
  Generator gen(seed);
  std::vector<CodeChange> out;
  out.reserve(n);
  std::size_t misses = 0;
  while (out.size() < n) {
    CodeChange c = gen.change();
    // Lines a diff would show as context are not part of the hunk.
    while (!c.old_lines.empty() && !c.new_lines.empty() &&
           c.old_lines.front() == c.new_lines.front()) {
      c.old_lines.erase(c.old_lines.begin());
      c.new_lines.erase(c.new_lines.begin());
    }
    while (!c.old_lines.empty() && !c.new_lines.empty() &&
           c.old_lines.back() == c.new_lines.back()) {
      c.old_lines.pop_back();
      c.new_lines.pop_back();
    }
    try {
      validate_change(c);
    } catch (const InvalidChange&) {
      if (++misses > 100 * (n + 10)) throw Error("synthetic generator stuck");
      continue;
    }
    c.id = static_cast<ChangeId>(out.size());
    c.repo = kRepos[out.size() % 5];
    c.commit = std::to_string(1000000 + out.size() / 3);
    c.file = "src/file" + std::to_string(out.size() % 97) + ".ml";
    out.push_back(std::move(c));
  }
  return out;
}

Corpus synthesize_corpus(std::size_t n, std::uint64_t seed) {
  Corpus corpus;
  for (auto& c : synthesize_changes(n, seed)) corpus.append_unchecked(std::move(c));
  return corpus;
}

}  // namespace dsx
