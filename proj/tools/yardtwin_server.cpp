// HTTP facade over the yard mirror, KPIs and simulation jobs.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "yardtwin/http.hpp"
#include "yardtwin/service.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace yardtwin;
  CLI::App app{"yardtwin HTTP service"};
  std::string layout_path = env_or("YARDTWIN_LAYOUT", "");
  std::string log_path = env_or("YARDTWIN_LOG", "");
  std::string listen = env_or("YARDTWIN_LISTEN", "127.0.0.1:8080");
  unsigned workers = static_cast<unsigned>(std::stoul(env_or("YARDTWIN_WORKERS", "2")));
  app.add_option("--layout", layout_path, "Layout JSON file (env YARDTWIN_LAYOUT)");
  app.add_option("--log", log_path, "Event log JSONL (env YARDTWIN_LOG)");
  app.add_option("--listen", listen, "host:port (env YARDTWIN_LISTEN)");
  app.add_option("--workers", workers, "Simulation worker threads (env YARDTWIN_WORKERS)")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const auto colon = listen.rfind(':');
  if (layout_path.empty() || log_path.empty() || colon == std::string::npos) {
    std::cerr << "--layout, --log and --listen host:port are required\n";
    return 2;
  }

  try {
    service::Service svc(cli::load_layout(layout_path), cli::load_log(log_path), workers);
    httplib::Server server;
    service::mount(server, svc);
    const std::string host = listen.substr(0, colon);
    const int port = std::stoi(listen.substr(colon + 1));
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "cannot listen on " << listen << '\n';
      return 1;
    }
  } catch (const cli::UsageError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const YardError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
