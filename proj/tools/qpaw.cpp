#include "qpaw/pipeline.hpp"

int main(int argc, char** argv) { return qpaw::pipeline::run_cli(argc, argv); }
