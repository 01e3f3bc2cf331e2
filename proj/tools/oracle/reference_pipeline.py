#!/usr/bin/env python3
"""Reference run of the flow-classification pipeline with pandas/scikit-learn.

Used by the acceptance suite as an independent oracle: drops id/attack_cat,
one-hot encodes proto/service/state with numeric passthrough, splits 80/20 with
random_state=42, then fits LogisticRegression(max_iter=10000) and
RandomForestClassifier(n_estimators=100, random_state=42). Prints a JSON object
with test accuracy and ROC AUC per model.
"""

import argparse
import json
import sys

import pandas as pd
from sklearn.compose import ColumnTransformer
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import accuracy_score, auc, roc_curve
from sklearn.model_selection import train_test_split
from sklearn.preprocessing import OneHotEncoder


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--models", default="logreg,rf")
    args = parser.parse_args()

    df = pd.read_csv(args.csv)
    df = df.drop(["id", "attack_cat"], axis=1)
    X = df.drop(["label"], axis=1)
    y = df["label"]
    categorical_cols = ["proto", "service", "state"]
    preprocessor = ColumnTransformer(
        transformers=[("cat", OneHotEncoder(), categorical_cols)], remainder="passthrough"
    )
    X_processed = preprocessor.fit_transform(X)
    X_train, X_test, y_train, y_test = train_test_split(
        X_processed, y, test_size=0.2, random_state=args.seed
    )

    models = {
        "logreg": lambda: LogisticRegression(max_iter=10000),
        "rf": lambda: RandomForestClassifier(n_estimators=args.trees, random_state=args.seed, n_jobs=-1),
    }
    out = {"rows": int(len(df)), "width": int(X_processed.shape[1])}
    for name in args.models.split(","):
        model = models[name]()
        model.fit(X_train, y_train)
        proba = model.predict_proba(X_test)[:, 1]
        fpr, tpr, _ = roc_curve(y_test, proba)
        out[name] = {
            "accuracy": float(accuracy_score(y_test, model.predict(X_test))),
            "auc": float(auc(fpr, tpr)),
        }
    json.dump(out, sys.stdout)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
