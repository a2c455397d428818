// Copyright 2026 The pianobench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives one episode over TCP: starts an in-process server on a free port,
// connects a client, and steps the zero action until the song ends.

#include <iostream>
#include <vector>

#include "pianobench/service.hpp"

int main(int argc, char** argv) {
  using namespace pianobench;
  const std::string song = argc > 1 ? argv[1] : "c_major_scale";
  try {
    ServiceContext context(EnvConfig{}, std::make_shared<const SongLibrary>(SongLibrary::builtin()));
    Server server(context);
    const int port = server.listen("127.0.0.1", 0);

    Client client("127.0.0.1", port);
    Message handshake{"handshake", {}};
    handshake.fields.set("version", kProtocolVersion);
    const Message info = client.call(handshake);
    std::cout << info.str() << '\n';

    Message reset{"reset", {}};
    reset.fields.set("song", song);
    const Message first = client.call(reset);
    if (first.kind == "error") {
      std::cerr << first.fields.at("message") << '\n';
      return 1;
    }
    const std::vector<double> action(static_cast<std::size_t>(info.fields.get_int<int>("action_dim")),
                                     0.0);
    Message step{"step", {}};
    step.fields.set("action", std::span<const double>(action));
    Message reply;
    do {
      reply = client.call(step);
      if (reply.kind == "error") {
        std::cerr << reply.fields.at("message") << '\n';
        return 1;
      }
    } while (!reply.fields.get_bool("done"));
    std::cout << "frames=" << first.fields.at("frames") << " f1=" << reply.fields.at("f1")
              << " return=" << reply.fields.at("sum_total") << '\n';
    client.call(Message{"close", {}});
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
