#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>

#include "amodal/service.hpp"
#include "commands.hpp"

namespace amodal::cli {

namespace {

const std::map<std::string, SpriteShape> kShapes = {
    {"rectangle", SpriteShape::kRectangle},
    {"ellipse", SpriteShape::kEllipse},
    {"polygon", SpriteShape::kPolygon}};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layered sprite scenes: synthesis, decomposition, evaluation and editing",
               "amodal"};
  app.set_config("--config", "", "key = value file; command line flags take precedence");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::vector<std::string> argv = {"amodal"};
  argv.insert(argv.end(), args.begin(), args.end());

  int jobs = 1;
  long overlap = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--jobs", jobs, "Scenes processed in parallel")->check(CLI::PositiveNumber);
  };

  // synth
  SynthOptions so;
  std::vector<std::string> shapes;
  std::string background = "flat", depth_cue = "random";
  auto* synth = app.add_subcommand("synth", "Generate a dataset of layered sprite scenes");
  synth->add_option("--count", so.count, "Number of scenes")->capture_default_str();
  synth->add_option("--seed", so.config.seed, "Base random seed")->capture_default_str();
  synth->add_option("--width", so.config.width)->capture_default_str();
  synth->add_option("--height", so.config.height)->capture_default_str();
  synth->add_option("--min-objects", so.config.min_objects)->capture_default_str();
  synth->add_option("--max-objects", so.config.max_objects)->capture_default_str();
  synth->add_option("--min-size", so.config.min_size)->capture_default_str();
  synth->add_option("--max-size", so.config.max_size)->capture_default_str();
  synth->add_option("--shapes", shapes, "Subset of rectangle, ellipse, polygon")
      ->check(CLI::IsMember({"rectangle", "ellipse", "polygon"}));
  synth->add_option("--background", background)
      ->check(CLI::IsMember({"flat", "gradient"}))->capture_default_str();
  synth->add_option("--depth-cue", depth_cue)
      ->check(CLI::IsMember({"random", "lower_is_nearer"}))->capture_default_str();
  synth->add_option("--texture-noise", so.config.texture_noise)->capture_default_str();
  synth->add_option("--overlap-threshold", so.config.overlap_threshold)->capture_default_str();
  synth->add_option("--out", so.out, "Output dataset directory")->required();
  add_common(synth);

  // decompose
  DecomposeOptions dop;
  auto* dec = app.add_subcommand("decompose", "Decompose scenes layer by layer");
  dec->add_option("--input", dop.input, "Dataset directory or a PNG image")->required();
  dec->add_option("--segmenter", dop.components.segmenter,
                  "oracle, corrupted or heuristic")->capture_default_str();
  dec->add_option("--completer", dop.components.completer, "oracle or inpaint")
      ->capture_default_str();
  dec->add_option("--class-threshold", dop.engine.class_score_threshold)->capture_default_str();
  dec->add_option("--nonocc-threshold", dop.engine.nonocc_threshold)->capture_default_str();
  dec->add_option("--max-steps", dop.engine.max_steps)->capture_default_str();
  dec->add_option("--max-detections", dop.engine.max_detections)->capture_default_str();
  dec->add_option("--overlap-threshold", dop.engine.overlap_threshold)->capture_default_str();
  dec->add_option("--mask-erode-px", dop.components.corruption.mask_erode_px,
                  "corrupted segmenter")->capture_default_str();
  dec->add_option("--mask-dilate-px", dop.components.corruption.mask_dilate_px)
      ->capture_default_str();
  dec->add_option("--label-flip-prob", dop.components.corruption.label_flip_prob)
      ->capture_default_str();
  dec->add_option("--drop-prob", dop.components.corruption.drop_prob)->capture_default_str();
  dec->add_option("--seed", dop.components.corruption.seed, "Corruption seed")
      ->capture_default_str();
  dec->add_option("--tolerance", dop.components.heuristic.tolerance,
                  "heuristic segmenter colour tolerance")->capture_default_str();
  dec->add_flag("--dump-steps", dop.dump_steps, "Write the input and every completed image");
  dec->add_option("--out", dop.out, "Output trace directory")->required();
  add_common(dec);

  // eval
  EvalOptions eo;
  std::string pred;
  auto* ev = app.add_subcommand("eval", "Score decompositions against ground truth");
  ev->add_option("--gt", eo.gt, "Ground-truth dataset directory")->required();
  ev->add_option("--pred", pred, "Trace directory (omit to score the ground truth itself)");
  ev->add_flag("--baselines", eo.baselines, "Add the ordering-rule comparison");
  ev->add_option("--overlap-threshold", overlap)->capture_default_str();
  ev->add_option("--out", eo.out, "Report directory")->required();
  add_common(ev);

  // recompose
  RecomposeOptions ro;
  std::string trace, dataset;
  auto* rec = app.add_subcommand("recompose", "Apply an edit script and render the result");
  rec->add_option("--trace", trace, "Trace JSON written with --dump-steps");
  rec->add_option("--dataset", dataset, "Dataset directory (edits the ground truth)");
  rec->add_option("--scene-id", ro.scene_id)->capture_default_str();
  rec->add_option("--edits", ro.edits, "JSON list of edits")->required();
  rec->add_option("--out", ro.out, "Output PNG")->required();

  // serve
  ServiceConfig sc;
  std::string data_dir;
  auto* serve = app.add_subcommand("serve", "Run the editing HTTP service");
  serve->add_option("--host", sc.host)->capture_default_str();
  serve->add_option("--port", sc.port)->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Persist sessions here");
  serve->add_option("--cors-origin", sc.cors_origin)->capture_default_str();

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*synth) {
      for (const auto& s : shapes) {
        if (&s == &shapes.front()) so.config.shapes.clear();
        so.config.shapes.push_back(kShapes.at(s));
      }
      so.config.background =
          background == "flat" ? BackgroundStyle::kFlat : BackgroundStyle::kGradient;
      so.config.depth_cue =
          depth_cue == "random" ? DepthCue::kRandom : DepthCue::kLowerIsNearer;
      so.jobs = jobs;
      cmd_synth(so, argv);
      out << "wrote " << so.count << " scenes to " << so.out.string() << "\n";
    } else if (*dec) {
      dop.jobs = jobs;
      const auto m = cmd_decompose(dop, argv);
      out << "decomposed " << m["scenes"] << " scenes into " << dop.out.string() << "\n";
    } else if (*ev) {
      if (!pred.empty()) eo.pred = pred;
      eo.overlap_threshold = overlap;
      eo.jobs = jobs;
      cmd_eval(eo, argv, out);
    } else if (*rec) {
      if (!trace.empty()) ro.trace = trace;
      if (!dataset.empty()) ro.dataset = dataset;
      cmd_recompose(ro, argv, err);
      out << "wrote " << ro.out.string() << "\n";
    } else if (*serve) {
      if (!data_dir.empty()) sc.data_dir = data_dir;
      Service service(sc);
      const int port = service.bind();
      out << "listening on http://" << sc.host << ":" << port << std::endl;
      service.listen();
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kOk;
}

}  // namespace amodal::cli
