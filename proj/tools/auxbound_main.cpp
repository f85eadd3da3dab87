#include "auxbound/pipeline.hpp"

int main(int argc, char** argv) { return auxbound::run_cli(argc, argv); }
