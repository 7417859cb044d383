// Drives the installed CLI through a full small pipeline and checks exit
// codes and output artifacts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAIL: " << what << "\n";
    }
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return "<missing:" + path + ">";
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_smoke <path-to-seqramp>\n";
        return 1;
    }
    const std::string cli = argv[1];
    const fs::path root = fs::temp_directory_path() / "seqramp_cli_smoke";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string dir = root.string();
    const std::string quiet = " > " + dir + "/stdout.txt 2> " + dir + "/stderr.txt";

    // data generation
    expect(run(cli + " gen-data --task parsing --out " + dir + "/data --seed 3" +
               " --size supervised=30 --size weak=60 --size dev=12 --size test=12" +
               " --size entities=20" + quiet) == 0,
           "gen-data exits 0");
    expect(fs::exists(root / "data" / "manifest.cfg"), "gen-data wrote a manifest");

    // config file
    {
        std::ofstream os(root / "mle.cfg");
        os << "task=parsing\nobjective=mle\n";
        os << "data_dir=" << dir << "/data\n";
        os << "out_dir=" << dir << "/mle\n";
        os << "embed_dim=10\nhidden_dim=12\nminibatch=8\nvalidation_interval=6\n";
        os << "max_validations=2\nmax_len=10\ntest_beam=4\nseed=5\n";
    }
    expect(run(cli + " train --config " + dir + "/mle.cfg" + quiet) == 0, "train exits 0");
    expect(fs::exists(root / "mle" / "ckpt_best.bin"), "train wrote the best checkpoint");
    expect(fs::exists(root / "mle" / "runlog.tsv"), "train wrote the run log");

    // evaluation is reproducible byte for byte
    const std::string eval_cmd = cli + " evaluate --config " + dir + "/mle.cfg --checkpoint " +
                                 dir + "/mle/ckpt_best.bin --split dev --out ";
    expect(run(eval_cmd + dir + "/dev_a.tsv" + quiet) == 0, "evaluate exits 0");
    expect(run(eval_cmd + dir + "/dev_b.tsv" + quiet) == 0, "evaluate exits 0 (again)");
    expect(slurp(dir + "/dev_a.tsv") == slurp(dir + "/dev_b.tsv"),
           "evaluate is deterministic byte for byte");

    // weak training from the pretrained checkpoint
    {
        std::ofstream os(root / "ramp.cfg");
        os << "task=parsing\nobjective=ramp\n";
        os << "data_dir=" << dir << "/data\n";
        os << "out_dir=" << dir << "/ramp\n";
        os << "init_checkpoint=" << dir << "/mle/ckpt_best.bin\n";
        os << "embed_dim=10\nhidden_dim=12\nminibatch=4\nkbest=3\ntrain_beam=4\n";
        os << "validation_interval=3\nmax_validations=1\nmax_len=10\ntest_beam=4\nseed=7\n";
    }
    expect(run(cli + " train --config " + dir + "/ramp.cfg --set seed=9" + quiet) == 0,
           "weak training exits 0");

    // significance of a report against itself
    expect(run(cli + " sigtest --a " + dir + "/dev_a.tsv --b " + dir +
               "/dev_b.tsv --metric f1 --iterations 200 --seed 4" + quiet) == 0,
           "sigtest exits 0");
    expect(slurp(dir + "/stdout.txt").find("p-value 1.0") != std::string::npos,
           "identical reports give p-value 1");

    // bucket report
    expect(run(cli + " report --input " + dir + "/dev_a.tsv --by length --out " + dir +
               "/buckets.tsv" + quiet) == 0,
           "report exits 0");
    expect(run(cli + " report --input " + dir + "/dev_a.tsv --by group --out " + dir +
               "/groups.tsv" + quiet) == 0,
           "group report exits 0");

    // decode
    {
        std::ofstream os(root / "inputs.txt");
        os << "what color is e1\n";
    }
    expect(run(cli + " decode --config " + dir + "/mle.cfg --checkpoint " + dir +
               "/mle/ckpt_best.bin --input " + dir + "/inputs.txt --out " + dir +
               "/decoded.tsv --kbest 3" + quiet) == 0,
           "decode exits 0");
    expect(slurp(dir + "/decoded.tsv").find("id\trank\tlogprob\ttokens") != std::string::npos,
           "decode wrote a header row");

    // exit codes: usage error 1, data error 2
    expect(run(cli + " train --config " + dir + "/mle.cfg --set bogus=1" + quiet) == 1,
           "unknown config key exits 1");
    expect(run(cli + " nonsense" + quiet) == 1, "unknown subcommand exits 1");
    expect(run(cli + " train --config " + dir + "/does_not_exist.cfg" + quiet) == 2,
           "missing config exits 2");
    expect(run(cli + " sigtest --a " + dir + "/missing.tsv --b " + dir +
               "/dev_b.tsv --metric f1" + quiet) == 2,
           "missing report exits 2");

    fs::remove_all(root);
    if (failures == 0) {
        std::cout << "cli smoke: all checks passed\n";
        return 0;
    }
    std::cerr << "cli smoke: " << failures << " checks failed\n";
    return 1;
}
