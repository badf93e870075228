from warpcap.cli.commands import entry_point

entry_point()
