#include "qrenew/commands.hpp"

int main(int argc, char** argv) { return qrenew::run_cli(argc, argv); }
