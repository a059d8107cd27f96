# command_registry.py
import importlib.util
import os

COMMAND_REGISTRY = {}

COMMAND_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "commands")


def load_commands():
    for filename in sorted(os.listdir(COMMAND_DIR)):
        if filename.endswith("_commands.py"):
            family = filename.replace(".py", "")
            module_path = os.path.join(COMMAND_DIR, filename)
            spec = importlib.util.spec_from_file_location(f"commands.{family}", module_path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            if not hasattr(module, "COMMANDS"):
                print(f" Warning: {filename} has no `COMMANDS` table")
                continue
            for name, entry in module.COMMANDS.items():
                if name in COMMAND_REGISTRY:
                    print(f" Warning: {filename} redefines command `{name}`, keeping the first")
                    continue
                COMMAND_REGISTRY[name] = entry


load_commands()
