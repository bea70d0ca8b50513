from friable.cli import main

main()
