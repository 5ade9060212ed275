#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <rfuzzy/cli.hpp>

int main(int argc, char** argv) {
  CLI::App app{"rfz - interpreter for fuzzy logic programs"};

  rfuzzy::cli_config config;
  if (const char* env = std::getenv("RFZ_DEPTH_LIMIT")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0)
      config.depth_limit = v;
    else
      std::cerr << "rfz: ignoring RFZ_DEPTH_LIMIT='" << env << "' (not a positive integer)\n";
  }

  bool repl = false;
  std::string format = "plain";
  app.add_option("files", config.program_paths, "program files (.rfz)");
  app.add_option("-q,--query", config.queries,
                 "query to answer in batch mode; repeat for several");
  app.add_flag("--repl", repl, "interactive prompt (default without --query)");
  app.add_option("--format", format, "answer format")
      ->check(CLI::IsMember({"plain", "json"}))
      ->capture_default_str();
  std::size_t max_answers = 0;
  CLI::Option* max_opt =
      app.add_option("--max-answers", max_answers, "cap on answers per query");
  app.add_option("--depth-limit", config.depth_limit,
                 "atom resolution budget per goal")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  config.mode = !repl && !config.queries.empty() ? rfuzzy::cli_config::run_mode::batch
                                                 : rfuzzy::cli_config::run_mode::repl;
  config.format = format == "json" ? rfuzzy::cli_config::output_format::json
                                   : rfuzzy::cli_config::output_format::plain;
  if (max_opt->count() > 0) config.max_answers = max_answers;

  return rfuzzy::run(config, std::cin, std::cout, std::cerr);
}
