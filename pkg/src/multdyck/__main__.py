from multdyck.cli import main

main()
