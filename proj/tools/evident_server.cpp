#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "evident/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"evident-server: HTTP API over an evident workspace"};
  std::string workspace = ".";
  if (const char* ws = std::getenv("EVIDENT_WORKSPACE"); ws && *ws) workspace = ws;
  evident::ServerOptions options;
  app.add_option("--workspace,-w", workspace, "Workspace directory");
  app.add_option("--host", options.host, "Address to bind");
  app.add_option("--port,-p", options.port, "Port to listen on");
  app.add_option("--cors-origin", options.cors_origin, "Access-Control-Allow-Origin value");
  CLI11_PARSE(app, argc, argv);

  try {
    evident::Service service(workspace);
    std::cerr << "evident-server: serving " << workspace << " on http://" << options.host << ":"
              << options.port << "\n";
    if (!evident::serve(service, options)) {
      std::cerr << "error: could not bind " << options.host << ":" << options.port << "\n";
      return 1;
    }
  } catch (const evident::Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.message() << "\n";
    return 1;
  }
  return 0;
}
