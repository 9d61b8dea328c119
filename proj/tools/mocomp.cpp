// mocomp: headless command-line front end to the motion comparison engine.
//
// Exit codes: 0 success, 1 engine error, 2 usage error.

#include <iostream>

#include "CLI11.hpp"
#include "cli_commands.hpp"

namespace {

using namespace mocomp::cli;

void add_inputs(CLI::App* cmd, Inputs& in, const char* what, int count) {
    cmd->add_option("motions", in.files, what)->required()->expected(count)->check(CLI::ExistingFile);
    cmd->add_option("--robot", in.robot, "URDF file (required for csv motions, overrides embedded robots)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--ee-link", in.ee_link, "End-effector link when --robot is given");
}

void add_output(CLI::App* cmd, Output& out, bool csv) {
    cmd->add_option("--json", out.json, "Write the JSON result to FILE ('-' for stdout)");
    if (csv) cmd->add_option("--csv", out.csv, "Write the result as csv to FILE ('-' for stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mocomp - compare robot motions"};
    app.require_subcommand(1);

    int rc = 0;
    Inputs in;
    Output out;

    auto* ingest_cmd = app.add_subcommand("ingest", "Load motion files and print their summaries");
    add_inputs(ingest_cmd, in, "Motion files (json or csv)", -1);
    add_output(ingest_cmd, out, false);
    ingest_cmd->callback([&] { rc = ingest(in, out); });

    AlignArgs align_args;
    auto* align_cmd = app.add_subcommand("align", "Time-warp one motion onto another");
    add_inputs(align_cmd, in, "Two motion files", 2);
    align_cmd->add_option("--cost", align_args.cost, "Local cost: joint_l2, ee or quat")
        ->check(CLI::IsMember({"joint_l2", "joint", "ee", "ee_position", "quat", "quaternion_geodesic"}));
    align_cmd->add_option("--window", align_args.window, "Band radius in samples");
    align_cmd->add_option("--frame-a", align_args.frame_a, "Link or track:<name> for the first motion");
    align_cmd->add_option("--frame-b", align_args.frame_b, "Link or track:<name> for the second motion");
    add_output(align_cmd, out, true);
    align_cmd->callback([&] { rc = align(in, align_args, out); });

    DiffArgs diff_args;
    auto* diff_cmd = app.add_subcommand("diff", "Difference or distance series between two motions");
    add_inputs(diff_cmd, in, "Two motion files", 2);
    diff_cmd->add_option("--quantity", diff_args.series.quantity, "joint, ee_pos or ee_speed")
        ->check(CLI::IsMember({"joint", "ee_pos", "ee_speed"}));
    diff_cmd->add_option("--joint", diff_args.series.joint, "Joint index or name");
    diff_cmd->add_option("--axis", diff_args.series.axis, "x, y or z for ee_pos");
    diff_cmd->add_option("--frame", diff_args.series.frame, "Link or track:<name>");
    diff_cmd->add_option("--deriv", diff_args.series.deriv, "Derivative order 0..3")->check(CLI::Range(0, 3));
    diff_cmd->add_option("--smooth", diff_args.series.smooth, "ma:<window> or ema:<alpha>");
    diff_cmd->add_option("--alignment", diff_args.alignment, "resampled or dtw")
        ->check(CLI::IsMember({"resampled", "dtw"}));
    diff_cmd->add_option("--cost", diff_args.cost, "Local cost for dtw alignment");
    diff_cmd->add_option("--window", diff_args.window, "Band radius for dtw alignment");
    diff_cmd->add_option("--mode", diff_args.mode, "difference or distance")
        ->check(CLI::IsMember({"difference", "distance"}));
    add_output(diff_cmd, out, true);
    diff_cmd->callback([&] { rc = diff(in, diff_args, out); });

    TraceArgs trace_args;
    auto* trace_cmd = app.add_subcommand("trace", "Position or quaternion trace of a link or track");
    add_inputs(trace_cmd, in, "Motion file", 1);
    trace_cmd->add_option("--kind", trace_args.kind, "position or quaternion")
        ->check(CLI::IsMember({"position", "quaternion"}));
    trace_cmd->add_option("--frame", trace_args.frame, "Link or track:<name> (default: end effector)");
    trace_cmd->add_option("--stride", trace_args.stride, "Seconds between cones");
    trace_cmd->add_option("--out", trace_args.out, "Write line-set geometry to FILE");
    add_output(trace_cmd, out, false);
    trace_cmd->callback([&] { rc = trace(in, trace_args, out); });

    EmbedArgs embed_args;
    auto* embed_cmd = app.add_subcommand("embed", "2D embedding of joint states (joint traces)");
    add_inputs(embed_cmd, in, "Motion files", -1);
    embed_cmd->add_option("--seed", embed_args.seed, "Random seed");
    embed_cmd->add_option("--method", embed_args.method, "umap or pca")->check(CLI::IsMember({"umap", "pca"}));
    embed_cmd->add_option("--n-neighbors", embed_args.n_neighbors, "UMAP neighborhood size");
    embed_cmd->add_option("--min-dist", embed_args.min_dist, "UMAP minimum distance");
    embed_cmd->add_option("--epochs", embed_args.n_epochs, "UMAP optimization epochs");
    add_output(embed_cmd, out, false);
    embed_cmd->callback([&] { rc = embed(in, embed_args, out); });

    std::string reference;
    auto* metrics_cmd = app.add_subcommand("metrics", "Duration, path length, jerk and tracking error");
    add_inputs(metrics_cmd, in, "Motion file", 1);
    metrics_cmd->add_option("--reference", reference, "Reference motion file or track:<name>");
    add_output(metrics_cmd, out, false);
    metrics_cmd->callback([&] { rc = metrics(in, reference, out); });

    double margin = 1e-6;
    auto* limits_cmd = app.add_subcommand("limits", "Spans where joints sit at their position limits");
    add_inputs(limits_cmd, in, "Motion file", 1);
    limits_cmd->add_option("--margin", margin, "Distance from a limit that still counts as at the limit");
    add_output(limits_cmd, out, false);
    limits_cmd->callback([&] { rc = limits(in, margin, out); });

    std::string which;
    std::string out_dir;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Example motions");
    fixtures_cmd->require_subcommand(1);
    auto* gen_cmd = fixtures_cmd->add_subcommand("gen", "Write a fixture set");
    gen_cmd->add_option("case", which, "A, B, C, D, speed or piecewise")
        ->required()
        ->check(CLI::IsMember({"A", "B", "C", "D", "speed", "piecewise"}));
    gen_cmd->add_option("--out", out_dir, "Output directory")->required();
    gen_cmd->callback([&] { rc = fixtures_gen(which, out_dir); });

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("--addr", serve_args.addr, "host:port")->envname("MOCOMP_ADDR");
    serve_cmd->add_option("--data-dir", serve_args.data_dir, "Persist motions and sessions here")
        ->envname("MOCOMP_DATA_DIR");
    serve_cmd->add_option("--static-dir", serve_args.static_dir, "Serve the web UI bundle from here")
        ->envname("MOCOMP_STATIC_DIR");
    serve_cmd->add_option("--max-upload", serve_args.max_upload, "Largest accepted request body in bytes")
        ->envname("MOCOMP_MAX_UPLOAD");
    serve_cmd->add_option("--seed", serve_args.seed, "Default embedding seed")->envname("MOCOMP_SEED");
    serve_cmd->callback([&] { rc = serve(serve_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return rc;
}
