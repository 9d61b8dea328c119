#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mocomp::cli {

/// Where a motion comes from and how to read it.
struct Inputs {
    std::vector<std::string> files;
    std::string robot;
    std::string ee_link;
};

/// "-" writes to stdout. Empty means human-readable output.
struct Output {
    std::string json;
    std::string csv;
};

struct AlignArgs {
    std::string cost = "joint_l2";
    std::optional<std::size_t> window;
    std::string frame_a;
    std::string frame_b;
};

struct SeriesArgs {
    std::string quantity = "joint";
    std::string joint;
    std::string axis = "x";
    std::string frame;
    int deriv = 0;
    std::string smooth;
};

struct DiffArgs {
    SeriesArgs series;
    std::string alignment = "resampled";
    std::string cost = "joint_l2";
    std::optional<std::size_t> window;
    std::string mode = "difference";
};

struct TraceArgs {
    std::string kind = "position";
    std::string frame;
    double stride = 0.1;
    std::string out;
};

struct EmbedArgs {
    std::uint64_t seed = 42;
    std::string method = "umap";
    int n_neighbors = 15;
    double min_dist = 0.1;
    int n_epochs = 200;
};

struct ServeArgs {
    std::string addr = "127.0.0.1:8080";
    std::string data_dir;
    std::string static_dir;
    std::size_t max_upload = 64u << 20;
    std::uint64_t seed = 42;
};

// Each returns the process exit code: 0 success, 1 engine error.
int ingest(const Inputs& in, const Output& out);
int align(const Inputs& in, const AlignArgs& args, const Output& out);
int diff(const Inputs& in, const DiffArgs& args, const Output& out);
int trace(const Inputs& in, const TraceArgs& args, const Output& out);
int embed(const Inputs& in, const EmbedArgs& args, const Output& out);
int metrics(const Inputs& in, const std::string& reference, const Output& out);
int limits(const Inputs& in, double margin, const Output& out);
int fixtures_gen(const std::string& which, const std::string& dir);
int serve(const ServeArgs& args);

}  // namespace mocomp::cli
