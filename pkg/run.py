#!/usr/bin/env python3
"""
Headline checks for the tnsd workbench: certificates, the distinct-sum
bound, a discharging sample and a small proof scan
"""
import json
import subprocess
import sys
from pathlib import Path

CHECKS = [
    ("🧮 Coefficient certificates", ["verify-cn", "--spot-checks", "2"]),
    ("➕ Distinct-sum bound (t <= 3, values 1..6)", ["verify-lemma", "--exhaustive", "3", "--max-value", "6"]),
    ("⚖️  Discharging on the Petersen graph", ["discharge", "--named", "petersen"]),
    ("🎨 Constructive colouring of K1,8", ["prove", "--named", "K1,8"]),
    ("🔍 Exact solver on connected graphs up to 5 vertices", ["scan", "--exhaustive", "5", "--action", "solve", "--k-auto"]),
    ("🌲 Proof scan on random sparse graphs", ["scan", "--random", "20", "--seed", "1", "--max-n", "30", "--action", "prove"]),
]


def install_requirements():
    """Install required packages"""
    print("📦 Installing requirements...")
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
        print("✅ Requirements installed successfully")
    except subprocess.CalledProcessError as e:
        print(f"❌ Failed to install requirements: {e}")
        return False
    return True


def run_check(title, args):
    print(f"\n{title}")
    process = subprocess.run(
        [sys.executable, "-m", "tnsd", *args],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )
    lines = [line for line in process.stdout.splitlines() if line.strip()]
    if lines:
        last = json.loads(lines[-1])
        if "summary" in last:
            print(f"   {last['summary']}")
    for line in process.stderr.splitlines()[-3:]:
        print(f"   {line}")
    if process.returncode == 0:
        print("✅ passed")
        return True
    print(f"❌ exit status {process.returncode}")
    return False


def main():
    """Main startup function"""
    print("🎨 tnsd workbench checks")
    print("=" * 50)

    if not Path("requirements.txt").exists():
        print("❌ Please run this script from the repository root")
        return 1

    if "--install" in sys.argv and not install_requirements():
        return 1

    results = [run_check(title, args) for title, args in CHECKS]

    print("\n" + "=" * 50)
    if all(results):
        print("🎉 All checks passed!")
        return 0
    print(f"⚠️  {results.count(False)} of {len(results)} checks failed")
    return 1


if __name__ == "__main__":
    sys.exit(main())
