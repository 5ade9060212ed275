#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "parser.hpp"

namespace rfuzzy {

struct cli_config {
  enum class run_mode { repl, batch };
  enum class output_format { plain, json };

  std::vector<std::string> program_paths;
  run_mode mode = run_mode::repl;
  std::vector<std::string> queries;  // batch mode, answered in order
  output_format format = output_format::plain;
  std::optional<std::size_t> max_answers;
  std::size_t depth_limit = 10000;
};

// Turns query text into a goal plus truth-value constraints. The last
// argument of the goal atom is the truth slot: a variable names the reported
// truth value, a number demands it exactly. Constraints after the goal may
// only mention the truth variable, e.g. "expensive_car(X, V), V > 0.8".
inline std::variant<query, diagnostic> parse_query(std::string_view text) {
  std::vector<diagnostic> lex_diags;
  std::vector<detail::token> toks = detail::scan(text, lex_diags);
  if (!lex_diags.empty()) {
    diagnostic d = lex_diags.front();
    d.code = "query";
    return d;
  }

  std::size_t i = 0;
  auto peek = [&]() -> const detail::token& { return toks[std::min(i, toks.size() - 1)]; };
  auto fail = [&](std::string message) {
    return diagnostic{severity::error, peek().line, peek().column, "query", std::move(message)};
  };

  if (peek().kind == detail::tok::query_mark) ++i;
  if (peek().kind != detail::tok::atom) return fail("expected a goal atom");
  std::string name = peek().text;
  ++i;
  if (peek().kind != detail::tok::lparen) return fail("expected '(' after the goal name");
  ++i;

  struct slot {
    term t;
    bool is_var;
    std::string var_name;
  };
  std::vector<slot> slots;
  for (;;) {
    const detail::token& t = peek();
    if (t.kind == detail::tok::variable) {
      slots.push_back({variable{t.text}, true, t.text});
    } else if (t.kind == detail::tok::atom) {
      slots.push_back({constant::symbol(t.text), false, {}});
    } else if (t.kind == detail::tok::number) {
      slots.push_back({constant::number(t.num), false, {}});
    } else {
      return fail("expected an argument, got '" + t.text + "'");
    }
    ++i;
    if (peek().kind == detail::tok::comma) {
      ++i;
      continue;
    }
    break;
  }
  if (peek().kind != detail::tok::rparen) return fail("expected ')'");
  ++i;
  if (slots.size() < 2)
    return fail("a goal needs at least one subject argument plus the truth slot");

  query q;
  slot truth_slot = slots.back();
  slots.pop_back();
  q.goal.key = predicate_key{std::move(name), static_cast<int>(slots.size())};
  for (slot& s : slots) q.goal.args.push_back(std::move(s.t));

  if (truth_slot.is_var) {
    q.truth_var = truth_slot.var_name;
    for (const slot& s : slots)
      if (s.is_var && s.var_name == q.truth_var)
        return fail("truth variable " + q.truth_var + " may not appear as a subject argument");
  } else {
    const constant& c = term_constant(truth_slot.t);
    if (!c.is_number()) return fail("the truth slot must be a variable or a number");
    if (c.number_value() < 0.0 || c.number_value() > 1.0)
      return fail("truth value " + c.text() + " outside [0,1]");
    q.constraints.push_back({comparator::eq, c.number_value()});
  }

  while (peek().kind == detail::tok::comma) {
    ++i;
    if (peek().kind != detail::tok::variable)
      return fail("constraints must start with the truth variable");
    std::string var = peek().text;
    ++i;
    if (q.truth_var.empty() || var != q.truth_var)
      return fail("constraints may only mention the truth variable" +
                  (q.truth_var.empty() ? std::string() : " " + q.truth_var));
    comparator cmp;
    switch (peek().kind) {
      case detail::tok::lt: cmp = comparator::lt; break;
      case detail::tok::le: cmp = comparator::le; break;
      case detail::tok::gt: cmp = comparator::gt; break;
      case detail::tok::ge: cmp = comparator::ge; break;
      case detail::tok::eq: cmp = comparator::eq; break;
      default: return fail("expected a comparator after " + var);
    }
    ++i;
    if (peek().kind != detail::tok::number) return fail("expected a number bound");
    double bound = peek().num;
    if (bound < 0.0 || bound > 1.0) return fail("truth bound " + peek().text + " outside [0,1]");
    ++i;
    q.constraints.push_back({cmp, bound});
  }
  if (peek().kind == detail::tok::clause_end) ++i;
  if (peek().kind != detail::tok::end) return fail("unexpected trailing '" + peek().text + "'");
  return q;
}

namespace detail {

inline nlohmann::ordered_json binding_json(const constant& c) {
  if (c.is_number()) return c.number_value();
  return c.symbol_text();
}

}  // namespace detail

// Renders answers for one query. Plain text follows the interactive style:
// one "Name = value, ..." line per answer, "yes" for an answer without
// bindings, "no" when there are no answers at all. JSON is one array with
// objects {"bindings": {...}, "tv": .., "source": ".."}.
inline std::string format_answers(std::span<const answer> answers,
                                  cli_config::output_format format) {
  if (format == cli_config::output_format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const answer& a : answers) {
      nlohmann::ordered_json obj;
      obj["bindings"] = nlohmann::ordered_json::object();
      for (const auto& [name, value] : a.bindings) obj["bindings"][name] = detail::binding_json(value);
      obj["tv"] = a.tv.value();
      obj["source"] = std::string(answer_source_name(a.source));
      arr.push_back(std::move(obj));
    }
    return arr.dump() + "\n";
  }

  if (answers.empty()) return "no\n";
  std::string out;
  for (const answer& a : answers) {
    if (a.bindings.empty()) {
      out += "yes\n";
      continue;
    }
    for (std::size_t i = 0; i < a.bindings.size(); ++i) {
      if (i) out += ", ";
      out += a.bindings[i].first + " = " + a.bindings[i].second.text();
    }
    out += "\n";
  }
  return out;
}

namespace detail {

// Program files are concatenated before parsing; this maps a line of the
// merged text back to its file for diagnostics.
struct line_map {
  struct chunk {
    std::string path;
    int first_line;
  };
  std::vector<chunk> chunks;

  std::pair<std::string_view, int> locate(int merged_line) const {
    std::string_view path = "<input>";
    int local = merged_line;
    for (const chunk& c : chunks) {
      if (merged_line < c.first_line) break;
      path = c.path;
      local = merged_line - c.first_line + 1;
    }
    return {path, local};
  }
};

inline void print_diagnostic(std::ostream& err, const line_map& map, const diagnostic& d) {
  auto [path, line] = map.locate(d.line);
  err << path << ":" << line << ":" << d.column << ": "
      << (d.sev == severity::error ? "error" : "warning") << "[" << d.code << "]: " << d.message
      << "\n";
}

inline void print_query_diagnostic(std::ostream& err, std::string_view origin,
                                   const diagnostic& d) {
  err << origin << ":" << d.line << ":" << d.column << ": error[" << d.code
      << "]: " << d.message << "\n";
}

struct query_outcome {
  bool parsed = false;
  bool resource = false;
  std::vector<answer> answers;
};

inline query_outcome execute_query(const program& prog, std::string_view text,
                                   const eval_limits& limits,
                                   std::optional<std::size_t> max_answers, std::ostream& err,
                                   std::string_view origin) {
  query_outcome out;
  std::variant<query, diagnostic> parsed = parse_query(text);
  if (const diagnostic* d = std::get_if<diagnostic>(&parsed)) {
    print_query_diagnostic(err, origin, *d);
    return out;
  }
  out.parsed = true;
  const query& q = *std::get_if<query>(&parsed);
  if (!prog.signature_of(q.goal.key)) {
    print_query_diagnostic(err, origin,
                           {severity::error, 1, 1, "query",
                            "goal " + q.goal.key.text() + " has no set_prop declaration"});
    return out;
  }
  try {
    answer_stream stream = solve(prog, q, limits);
    while (std::optional<answer> a = stream.next()) {
      if (!q.truth_var.empty())
        a->bindings.insert(a->bindings.begin(),
                           {q.truth_var, constant::number(a->tv.value())});
      out.answers.push_back(std::move(*a));
      if (max_answers && out.answers.size() >= *max_answers) break;
    }
  } catch (const resource_limit_error& e) {
    err << origin << ": error[resource]: " << e.what() << "\n";
    out.resource = true;
  }
  return out;
}

}  // namespace detail

// Loads the program files, reports diagnostics, then answers queries either
// from the batch list or interactively. Exit codes: 0 when every batch query
// produced an answer, 1 when any produced none, 2 on compile or read errors,
// 3 when a query exhausted its resolution budget.
inline int run(const cli_config& config, std::istream& in, std::ostream& out, std::ostream& err) {
  std::string merged;
  detail::line_map map;
  int next_line = 1;
  for (const std::string& path : config.program_paths) {
    std::ifstream file(path);
    if (!file) {
      err << path << ": error[io]: cannot read file\n";
      return 2;
    }
    std::ostringstream buf;
    buf << file.rdbuf();
    std::string text = buf.str();
    if (text.empty() || text.back() != '\n') text += '\n';
    map.chunks.push_back({path, next_line});
    next_line += static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    merged += text;
  }

  parse_result parsed = parse_program({merged, "<merged>"});
  bool compile_error = false;
  for (const diagnostic& d : parsed.diagnostics) {
    detail::print_diagnostic(err, map, d);
    compile_error = compile_error || d.sev == severity::error;
  }
  if (!parsed.ok() || compile_error) return 2;

  std::vector<diagnostic> issues = validate(*parsed.prog);
  for (const diagnostic& d : issues) {
    detail::print_diagnostic(err, map, d);
    compile_error = compile_error || d.sev == severity::error;
  }
  if (compile_error) return 2;

  const program& prog = *parsed.prog;
  eval_limits limits{config.depth_limit};

  if (config.mode == cli_config::run_mode::batch) {
    bool any_empty = false;
    for (const std::string& text : config.queries) {
      detail::query_outcome outcome =
          detail::execute_query(prog, text, limits, config.max_answers, err, "<query>");
      if (outcome.resource) return 3;
      if (outcome.parsed) out << format_answers(outcome.answers, config.format);
      any_empty = any_empty || outcome.answers.empty();
    }
    return any_empty ? 1 : 0;
  }

  std::string line;
  for (;;) {
    err << "?- " << std::flush;
    if (!std::getline(in, line)) break;
    std::size_t b = line.find_first_not_of(" \t\r");
    std::size_t e = line.find_last_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::string text = line.substr(b, e - b + 1);
    if (text == "halt." || text == "halt" || text == "quit." || text == "quit") break;
    detail::query_outcome outcome =
        detail::execute_query(prog, text, limits, config.max_answers, err, "<repl>");
    if (!outcome.parsed || outcome.resource) continue;
    out << format_answers(outcome.answers, config.format) << std::flush;
  }
  return 0;
}

}  // namespace rfuzzy
