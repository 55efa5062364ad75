#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "nlbvp/solver.hpp"

namespace nlbvp::solver {

void write_csv(const DiscreteSolution& sol, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "angle,t,omega,value\n";
  const auto& g = sol.grid;
  for (int k = 0; k < g.n_angles(); ++k) {
    for (int j = 0; j <= g.n_t; ++j) {
      for (int i = 0; i <= g.n_omega[static_cast<std::size_t>(k)]; ++i) {
        out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", k, g.t(j), g.omega(k, i), sol.at(k, j, i));
      }
    }
  }
}

void write_binary(const DiscreteSolution& sol, const std::filesystem::path& bin,
                  const std::filesystem::path& sidecar) {
  static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + bin.string());
  out.write(reinterpret_cast<const char*>(sol.values.data()),
            static_cast<std::streamsize>(sol.values.size() * sizeof(double)));
  const auto& g = sol.grid;
  nlohmann::ordered_json j;
  j["format"] = "float64-le";
  j["layout"] = "per angle, row-major, t slow, omega fast";
  j["T"] = g.T;
  j["dt"] = g.dt;
  j["domega"] = g.domega;
  j["n_t"] = g.n_t;
  j["n_omega"] = g.n_omega;
  j["half_openings"] = g.half_openings;
  j["offset"] = g.offset;
  j["data"] = bin.filename().string();
  j["solver"] = {{"method", sol.info.method},
                 {"iterations", sol.info.iterations},
                 {"relative_residual", sol.info.relative_residual}};
  std::ofstream side(sidecar);
  if (!side) throw std::runtime_error("cannot write " + sidecar.string());
  side << j.dump(2) << "\n";
}

}  // namespace nlbvp::solver
