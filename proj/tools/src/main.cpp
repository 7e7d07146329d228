// Copyright 2026 The voicemark Authors
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

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "voicemark/attacks.hpp"
#include "voicemark/version.hpp"
#include "voicemark_app/app.hpp"

namespace {

using namespace voicemark;

const std::map<std::string, SampleFormat> kFormats{
    {"pcm16", SampleFormat::kPcm16}, {"pcm24", SampleFormat::kPcm24}, {"float32", SampleFormat::kFloat32}};

void add_format(CLI::App* cmd, SampleFormat& target) {
  cmd->add_option("--format", target, "Output sample format (pcm16, pcm24, float32)")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
}

// Converts "LO:HI" / "WxH" strings after parsing so errors map to our exit codes.
template <typename T, typename Fn>
void convert(const std::optional<std::string>& text, std::optional<T>& dst, Fn&& parse) {
  if (text) dst = parse(*text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech anonymization and McAdams-coefficient watermarking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(voicemark::version()));

  app::AnonymizeOptions anon;
  auto* c_anon = app.add_subcommand("anonymize", "Warp LPC pole angles of a WAV file");
  c_anon->add_option("input", anon.input, "Input WAV")->required();
  c_anon->add_option("output", anon.output, "Output WAV")->required();
  c_anon->add_option("--alpha", anon.alpha, "McAdams coefficient")->capture_default_str();
  add_format(c_anon, anon.format);

  app::EmbedOptions emb;
  auto* c_emb = app.add_subcommand("embed", "Embed a bit-stream or PBM image");
  c_emb->add_option("input", emb.input, "Input WAV")->required();
  c_emb->add_option("output", emb.output, "Watermarked WAV")->required();
  auto* o_bits = c_emb->add_option("--bits", emb.bits_file, "File of '0'/'1' characters");
  auto* o_image = c_emb->add_option("--image", emb.image_file, "PBM image (P1 or P4)");
  o_bits->excludes(o_image);
  c_emb->add_option("--config", emb.config_file, "Watermark config file");
  c_emb->add_option("--payload", emb.payload_bps, "Payload in bits per second");
  c_emb->add_option("--alpha0", emb.alpha0, "McAdams coefficient for bit 0");
  c_emb->add_option("--alpha1", emb.alpha1, "McAdams coefficient for bit 1");
  add_format(c_emb, emb.format);

  app::DetectOptions det;
  std::optional<std::string> det_band, det_ref, det_image;
  auto* c_det = app.add_subcommand("detect", "Blind detection; prints bits on stdout");
  c_det->add_option("input", det.input, "Watermarked WAV")->required();
  c_det->add_option("--config", det.config_file, "Watermark config file");
  c_det->add_option("--payload", det.payload_bps, "Payload in bits per second");
  c_det->add_option("--theta", det.theta, "Detection threshold (band-power ratio)");
  c_det->add_option("--num-bits", det.num_bits, "Bits to read (default: capacity)");
  c_det->add_option("--band", det_band, "Detection band LO:HI in Hz");
  c_det->add_option("--reference", det_ref, "Reference band LO:HI in Hz");
  c_det->add_option("--report", det.report_file, "Write the per-frame report here");
  c_det->add_option("--image", det_image, "Reconstruct a WxH PBM image");
  c_det->add_option("--image-out", det.image_out, "Path for --image (default detected.pbm)");

  app::AttackOptions att;
  auto* c_att = app.add_subcommand("attack", "Apply a robustness attack");
  c_att->add_option("input", att.input, "Input WAV")->required();
  c_att->add_option("output", att.output, "Attacked WAV")->required();
  c_att->add_option("--attack", att.attack, "One of: normal awgn resample-8 resample-24 requant-8 requant-24 mp3 flv g723.1")
      ->capture_default_str();
  c_att->add_option("--snr", att.snr_db, "AWGN SNR in dB (default 40)");
  c_att->add_option("--seed", att.seed, "AWGN seed")->capture_default_str();
  c_att->add_option("--command", att.command, "Codec command template with {in} and {out}");
  add_format(c_att, att.format);

  app::CalibrateOptions cal;
  std::optional<std::string> cal_band, cal_ref;
  auto* c_cal = app.add_subcommand("calibrate", "Pick the detection threshold on a corpus");
  c_cal->add_option("corpus", cal.corpus_dir, "Directory of WAV files")->required();
  c_cal->add_option("-o,--output", cal.output, "Config file to write")->required();
  c_cal->add_option("--config", cal.config_file, "Base config file");
  c_cal->add_option("--payload", cal.payload_bps, "Payload in bits per second")->capture_default_str();
  c_cal->add_option("--band", cal_band, "Detection band LO:HI in Hz");
  c_cal->add_option("--reference", cal_ref, "Reference band LO:HI in Hz");
  c_cal->add_flag("--search-bands", cal.search_bands, "Also search band and reference edges");
  c_cal->add_option("--seed", cal.seed, "Seed for the calibration bits")->capture_default_str();

  app::EvaluateOptions ev;
  auto* c_ev = app.add_subcommand("evaluate", "Robustness sweep over payloads and attacks");
  c_ev->add_option("corpus", ev.corpus_dir, "Directory of WAV files")->required();
  c_ev->add_option("--report", ev.report_file, "Report file to write")->required();
  c_ev->add_option("--payloads", ev.payloads, "Payloads in bits per second")->delimiter(',')
      ->capture_default_str();
  c_ev->add_option("--attacks", ev.attacks, "Attack names (default: all nine)")->delimiter(',');
  c_ev->add_option("--seed", ev.seed, "Run seed")->capture_default_str();
  c_ev->add_option("--config", ev.config_file, "Base config file");
  c_ev->add_option("--calibrate", ev.calibration_dir, "Calibrate theta per payload on this corpus first");
  c_ev->add_flag("--search-bands", ev.search_bands, "With --calibrate, also search bands");
  c_ev->add_flag("--require-codecs", ev.require_codecs, "Exit 5 if a codec attack was skipped");
  c_ev->add_flag("-v,--verbose", ev.verbose, "Progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return app::kExitValidation;
  }

  try {
    convert(det_band, det.band, app::parse_band);
    convert(det_ref, det.reference, app::parse_band);
    convert(det_image, det.image, app::parse_geometry);
    convert(cal_band, cal.band, app::parse_band);
    convert(cal_ref, cal.reference, app::parse_band);
  } catch (const Error& e) {
    std::cerr << "voicemark: " << e.what() << '\n';
    return app::exit_code(e.kind());
  }

  if (*c_anon) return app::cmd_anonymize(anon, std::cout, std::cerr);
  if (*c_emb) return app::cmd_embed(emb, std::cout, std::cerr);
  if (*c_det) return app::cmd_detect(det, std::cout, std::cerr);
  if (*c_att) return app::cmd_attack(att, std::cout, std::cerr);
  if (*c_cal) return app::cmd_calibrate(cal, std::cout, std::cerr);
  if (*c_ev) return app::cmd_evaluate(ev, std::cout, std::cerr);
  return app::kExitValidation;
}
