#include "csmri/cli.hpp"

int main(int argc, char **argv)
{
  return csmri::cli_main(argc, argv);
}
