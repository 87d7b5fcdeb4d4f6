#include "cevsim/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "cevsim/format.hpp"

namespace cevsim {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

const std::string& seed_derivation_doc() {
    static const std::string doc =
        "stream_id = mix64((seed + 0x9E3779B97F4A7C15) ^ "
        "(trajectory * 0xD1342543DE82EF95 + 0x2545F4914F6CDD1D)); "
        "uniform counter c of a stream: mix64(stream_id + (c + 1) * 0x9E3779B97F4A7C15); "
        "normal draw k uses counters 2*(k/2) and 2*(k/2)+1 through Box-Muller with "
        "u1 = ((ra>>12)|1)*2^-52, u2 = (rb>>12)*2^-52; "
        "sweep row i reseeds with mix64(seed ^ (0xC2B2AE3D27D4EB4F * (i + 1))); "
        "mix64 is the SplitMix64 finalizer";
    return doc;
}

nlohmann::json RunManifest::to_json() const {
    return nlohmann::json{{"tool", "cevsim"},
                          {"version", kVersion},
                          {"command", command},
                          {"timestamp_utc", utc_timestamp()},
                          {"inputs", inputs},
                          {"kernel", kernel},
                          {"seed_derivation", seed_derivation_doc()}};
}

std::string RunManifest::write_sidecar(const std::string& output_path) const {
    const std::string path = output_path + ".manifest.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open manifest file: " + path);
    f << to_json().dump(2) << '\n';
    if (!f) throw std::runtime_error("failed writing manifest file: " + path);
    return path;
}

}  // namespace cevsim
